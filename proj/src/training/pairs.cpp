#include "cae/training/pairs.hpp"

#include <algorithm>
#include <map>

#include "cae/common/errors.hpp"

namespace cae::training {

PairSampler::PairSampler(std::span<const data::ImageSample> samples, std::uint64_t subsample_limit,
                         std::size_t pairs_per_epoch)
    : pairs_per_epoch_(pairs_per_epoch), sample_count_(samples.size()) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].label.index].push_back(i);
  if (by_class.size() < 2) throw ConfigError("pair sampling needs at least two classes with samples");
  for (auto& [id, members] : by_class) {
    class_ids_.push_back(id);
    members_.push_back(std::move(members));
  }
  for (std::size_t i = 0; i < members_.size(); ++i)
    for (std::size_t j = i + 1; j < members_.size(); ++j)
      cross_pairs_ += static_cast<std::uint64_t>(members_[i].size()) * members_[j].size();
  enumerate_ = cross_pairs_ <= subsample_limit;
}

std::size_t PairSampler::epoch_size() const noexcept {
  if (enumerate_) return static_cast<std::size_t>(cross_pairs_);
  if (pairs_per_epoch_ > 0) return pairs_per_epoch_;
  return std::max<std::size_t>(1, sample_count_ / 2);
}

std::vector<std::pair<std::size_t, std::size_t>> PairSampler::epoch(Rng& rng) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(epoch_size());
  if (enumerate_) {
    for (std::size_t i = 0; i < members_.size(); ++i)
      for (std::size_t j = i + 1; j < members_.size(); ++j)
        for (std::size_t a : members_[i])
          for (std::size_t b : members_[j]) out.emplace_back(a, b);
    shuffle(out.begin(), out.end(), rng);
    return out;
  }
  const std::size_t k = members_.size();
  const std::size_t class_pairs = k * (k - 1) / 2;
  for (std::size_t n = 0; n < epoch_size(); ++n) {
    // Unordered class pair p in [0, k(k-1)/2), unranked row by row.
    std::size_t p = uniform_index(rng, class_pairs);
    std::size_t i = 0;
    while (p >= k - 1 - i) {
      p -= k - 1 - i;
      ++i;
    }
    const std::size_t j = i + 1 + p;
    const std::size_t a = members_[i][uniform_index(rng, members_[i].size())];
    const std::size_t b = members_[j][uniform_index(rng, members_[j].size())];
    out.emplace_back(a, b);
  }
  return out;
}

PairBatch sample_pairs(std::span<const data::ImageSample> samples, std::size_t batch_size, Rng& rng,
                       std::uint64_t subsample_limit) {
  if (batch_size == 0) throw ContractError("sample_pairs: batch size must be positive");
  const PairSampler sampler(samples, subsample_limit, batch_size);
  auto pairs = sampler.epoch(rng);
  if (pairs.size() > batch_size) pairs.resize(batch_size);
  return make_batches(pairs, batch_size).front();
}

std::vector<PairBatch> make_batches(const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::size_t batch_size) {
  if (batch_size == 0) throw ContractError("make_batches: batch size must be positive");
  std::vector<PairBatch> out;
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    PairBatch batch;
    for (std::size_t i = start; i < std::min(pairs.size(), start + batch_size); ++i) {
      batch.a.push_back(pairs[i].first);
      batch.b.push_back(pairs[i].second);
    }
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace cae::training
