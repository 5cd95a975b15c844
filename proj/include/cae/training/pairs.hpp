#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cae/common/random.hpp"
#include "cae/data/dataset.hpp"

namespace cae::training {

/// Aligned indices into a sample list; label(samples[a[i]]) != label(samples[b[i]]).
struct PairBatch {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;

  std::size_t size() const noexcept { return a.size(); }
};

/// Draws cross-class pairs. When the number of distinct cross-class pairs is at
/// most `subsample_limit`, an epoch is a shuffled enumeration of all of them;
/// otherwise each pair picks an unordered class pair uniformly, then one member
/// of each class uniformly. The lower class index always sits on side A.
class PairSampler {
 public:
  // Throws ConfigError when fewer than two classes have samples.
  PairSampler(std::span<const data::ImageSample> samples, std::uint64_t subsample_limit,
              std::size_t pairs_per_epoch = 0);

  bool enumerates() const noexcept { return enumerate_; }
  std::uint64_t cross_pair_count() const noexcept { return cross_pairs_; }
  // Enumeration: every cross pair. Sampling: pairs_per_epoch, or half the sample count when 0.
  std::size_t epoch_size() const noexcept;

  std::vector<std::pair<std::size_t, std::size_t>> epoch(Rng& rng) const;

 private:
  std::vector<int> class_ids_;                   // classes with at least one member, ascending
  std::vector<std::vector<std::size_t>> members_;  // per entry of class_ids_
  std::uint64_t cross_pairs_ = 0;
  bool enumerate_ = false;
  std::size_t pairs_per_epoch_ = 0;
  std::size_t sample_count_ = 0;
};

// First `batch_size` pairs of a fresh epoch drawn from `rng`.
PairBatch sample_pairs(std::span<const data::ImageSample> samples, std::size_t batch_size, Rng& rng,
                       std::uint64_t subsample_limit);

std::vector<PairBatch> make_batches(const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::size_t batch_size);

}  // namespace cae::training
