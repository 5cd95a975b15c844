#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cae/data/dataset.hpp"
#include "cae/manifold/index.hpp"
#include "cae/manifold/random_forest.hpp"
#include "cae/nets/blackbox.hpp"
#include "cae/nets/codes.hpp"

namespace cae::manifold {

struct ProbeResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> fold_accuracies;
};

// Fold id per sample, stratified by label.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

ProbeResult probe_separability(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
                               int folds, std::uint64_t seed, ForestParams params = {});
ProbeResult probe_separability(const ManifoldIndex& index, int folds = 10, std::uint64_t seed = 0,
                               ForestParams params = {});

// Fraction of decode(code, carrier) assigned to `expected`. Throws ContractError on empty input.
double smoothness_check(std::span<const ClassCode> codes, const nets::IndividualCode& carrier,
                        const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier, int expected,
                        std::size_t batch_size = 64);

// Ordered (A, B) index pairs with different labels: each sample A is paired
// with `per_sample` partners drawn uniformly from the other classes.
std::vector<std::pair<std::size_t, std::size_t>> sample_swap_pairs(std::span<const data::ImageSample> samples,
                                                                   std::uint64_t seed, int per_sample = 1);

struct SwapResult {
  double rate = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
};

// Fraction of decode(c_B, s_A) classified as y_B over the given pairs.
SwapResult class_swap_success_rate(std::span<const data::ImageSample> samples,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                   const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                                   std::size_t batch_size = 64);
SwapResult class_swap_success_rate(std::span<const data::ImageSample> samples, const nets::CodeModel& model,
                                   const nets::BlackBoxClassifier& classifier, std::uint64_t seed);

}  // namespace cae::manifold
