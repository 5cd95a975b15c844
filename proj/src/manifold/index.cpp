#include "cae/manifold/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cae::manifold {

ClassCode mean_code(std::vector<ClassCode> codes) {
  if (codes.empty()) throw ContractError("mean_code: no codes");
  const std::size_t d = codes.front().size();
  std::sort(codes.begin(), codes.end(), [](const ClassCode& a, const ClassCode& b) { return a.values < b.values; });
  std::vector<double> acc(d, 0.0);
  for (const auto& c : codes) {
    if (c.size() != d) throw ContractError("mean_code: codes differ in length");
    for (std::size_t k = 0; k < d; ++k) acc[k] += c.values[k];
  }
  ClassCode out;
  out.values.resize(d);
  for (std::size_t k = 0; k < d; ++k) out.values[k] = static_cast<float>(acc[k] / static_cast<double>(codes.size()));
  return out;
}

double euclidean(const ClassCode& a, const ClassCode& b) {
  if (a.size() != b.size()) throw ContractError("euclidean: codes differ in length");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a.values[k]) - b.values[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

ManifoldIndex::ManifoldIndex(std::vector<ManifoldEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) return;
  dim_ = static_cast<int>(entries_.front().code.size());
  std::set<std::string> ids;
  std::map<int, std::vector<ClassCode>> by_class;
  for (const auto& e : entries_) {
    if (static_cast<int>(e.code.size()) != dim_) throw ContractError("ManifoldIndex: inconsistent code length");
    if (!ids.insert(e.sample_id).second) throw ContractError("ManifoldIndex: duplicate sample id '" + e.sample_id + "'");
    by_class[e.label.index].push_back(e.code);
  }
  for (auto& [k, codes] : by_class) centroids_[k] = mean_code(std::move(codes));
}

const ClassCode& ManifoldIndex::centroid(int class_index) const {
  auto it = centroids_.find(class_index);
  if (it == centroids_.end()) throw ContractError("centroid: class " + std::to_string(class_index) + " has no members");
  return it->second;
}

std::vector<std::size_t> ManifoldIndex::members(int class_index) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].label.index == class_index) out.push_back(i);
  }
  return out;
}

std::vector<int> ManifoldIndex::class_indices() const {
  std::vector<int> out;
  for (const auto& [k, _] : centroids_) out.push_back(k);
  return out;
}

const ManifoldEntry* ManifoldIndex::find(std::string_view sample_id) const {
  for (const auto& e : entries_) {
    if (e.sample_id == sample_id) return &e;
  }
  return nullptr;
}

const ManifoldEntry& ManifoldIndex::nearest(const ClassCode& point) const {
  if (entries_.empty()) throw StateError("nearest: empty index");
  const ManifoldEntry* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& e : entries_) {
    const double d = euclidean(e.code, point);
    if (d < best_d) {
      best_d = d;
      best = &e;
    }
  }
  return *best;
}

ManifoldIndex build_index(std::span<const data::ImageSample> samples, const nets::CodeModel& model,
                          std::size_t batch_size) {
  std::vector<ManifoldEntry> entries;
  entries.reserve(samples.size());
  std::vector<Image> batch;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t end = std::min(samples.size(), start + batch_size);
    batch.clear();
    for (std::size_t i = start; i < end; ++i) batch.push_back(samples[i].pixels);
    auto encoded = model.encode(batch);
    for (std::size_t i = start; i < end; ++i) {
      entries.push_back({samples[i].id, samples[i].label, std::move(encoded[i - start].class_code), samples[i].split});
    }
  }
  return ManifoldIndex(std::move(entries));
}

}  // namespace cae::manifold
