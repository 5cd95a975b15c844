#include "cae/manifold/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "cae/common/random.hpp"

namespace cae::manifold {

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ContractError("stratified_folds: need at least two folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(derive_seed(seed, "folds"));
  std::vector<int> fold_of(labels.size(), 0);
  for (auto& [label, members] : by_class) {
    if (static_cast<int>(members.size()) < folds) {
      throw ContractError("probe_separability: class " + std::to_string(label) + " has " +
                          std::to_string(members.size()) + " samples, fewer than " + std::to_string(folds) + " folds");
    }
    shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < members.size(); ++k) fold_of[members[k]] = static_cast<int>(k % folds);
  }
  return fold_of;
}

ProbeResult probe_separability(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
                               int folds, std::uint64_t seed, ForestParams params) {
  if (features.size() != labels.size()) throw ContractError("probe_separability: features/labels size mismatch");
  const std::vector<int> fold_of = stratified_folds(labels, folds, seed);
  params.seed = derive_seed(seed, "forest");
  ProbeResult result;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (fold_of[i] == f) {
        test_x.push_back(features[i]);
        test_y.push_back(labels[i]);
      } else {
        train_x.push_back(features[i]);
        train_y.push_back(labels[i]);
      }
    }
    RandomForest forest(params);
    forest.fit(train_x, train_y);
    const auto pred = forest.predict(test_x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test_y[i];
    result.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(pred.size()));
  }
  double sum = 0.0;
  for (double a : result.fold_accuracies) sum += a;
  result.mean = sum / folds;
  double var = 0.0;
  for (double a : result.fold_accuracies) var += (a - result.mean) * (a - result.mean);
  result.stddev = std::sqrt(var / (folds - 1));
  return result;
}

ProbeResult probe_separability(const ManifoldIndex& index, int folds, std::uint64_t seed, ForestParams params) {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  for (const auto& e : index.entries()) {
    features.emplace_back(e.code.values.begin(), e.code.values.end());
    labels.push_back(e.label.index);
  }
  return probe_separability(features, labels, folds, seed, params);
}

double smoothness_check(std::span<const ClassCode> codes, const nets::IndividualCode& carrier,
                        const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier, int expected,
                        std::size_t batch_size) {
  if (codes.empty()) throw ContractError("smoothness_check: no codes; ratio undefined");
  std::size_t hits = 0;
  for (std::size_t start = 0; start < codes.size(); start += batch_size) {
    const std::size_t end = std::min(codes.size(), start + batch_size);
    std::vector<nets::IndividualCode> carriers(end - start, carrier);
    const auto images = model.decode(codes.subspan(start, end - start), carriers);
    for (const auto& p : classifier.classify(images)) hits += nets::argmax(p) == static_cast<std::size_t>(expected);
  }
  return static_cast<double>(hits) / static_cast<double>(codes.size());
}

std::vector<std::pair<std::size_t, std::size_t>> sample_swap_pairs(std::span<const data::ImageSample> samples,
                                                                   std::uint64_t seed, int per_sample) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].label.index].push_back(i);
  if (by_class.size() < 2) throw ContractError("class_swap_success_rate: need at least two classes");
  Rng rng(derive_seed(seed, "swap-pairs"));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    std::vector<std::size_t> others;
    for (const auto& [label, members] : by_class) {
      if (label != samples[a].label.index) others.insert(others.end(), members.begin(), members.end());
    }
    for (int k = 0; k < per_sample; ++k) pairs.emplace_back(a, others[uniform_index(rng, others.size())]);
  }
  return pairs;
}

SwapResult class_swap_success_rate(std::span<const data::ImageSample> samples,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                   const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                                   std::size_t batch_size) {
  SwapResult result;
  if (pairs.empty()) return result;
  // Encode every sample once; pairs only index into the cache.
  std::vector<nets::EncodedImage> codes;
  codes.reserve(samples.size());
  std::vector<Image> batch;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    batch.clear();
    for (std::size_t i = start; i < std::min(samples.size(), start + batch_size); ++i) batch.push_back(samples[i].pixels);
    for (auto& e : model.encode(batch)) codes.push_back(std::move(e));
  }
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    const std::size_t end = std::min(pairs.size(), start + batch_size);
    std::vector<nets::ClassCode> cs;
    std::vector<nets::IndividualCode> ss;
    for (std::size_t k = start; k < end; ++k) {
      const auto [a, b] = pairs[k];
      if (samples[a].label.index == samples[b].label.index) {
        throw ContractError("class_swap_success_rate: same-class pair");
      }
      cs.push_back(codes[b].class_code);
      ss.push_back(codes[a].individual);
    }
    const auto probs = classifier.classify(model.decode(cs, ss));
    for (std::size_t k = start; k < end; ++k) {
      const auto target = static_cast<std::size_t>(samples[pairs[k].second].label.index);
      result.successes += nets::argmax(probs[k - start]) == target;
    }
  }
  result.trials = pairs.size();
  result.rate = static_cast<double>(result.successes) / static_cast<double>(result.trials);
  return result;
}

SwapResult class_swap_success_rate(std::span<const data::ImageSample> samples, const nets::CodeModel& model,
                                   const nets::BlackBoxClassifier& classifier, std::uint64_t seed) {
  return class_swap_success_rate(samples, sample_swap_pairs(samples, seed), model, classifier);
}

}  // namespace cae::manifold
