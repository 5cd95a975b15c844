#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cae/data/dataset.hpp"
#include "cae/nets/codes.hpp"

namespace cae::manifold {

using nets::ClassCode;

struct ManifoldEntry {
  std::string sample_id;
  data::ClassLabel label;
  ClassCode code;
  data::Split split = data::Split::test;
};

/// Immutable population of class-associated codes with per-class centroids.
class ManifoldIndex {
 public:
  ManifoldIndex() = default;
  explicit ManifoldIndex(std::vector<ManifoldEntry> entries);

  const std::vector<ManifoldEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  int dim() const noexcept { return dim_; }

  // Throws ContractError when the class has no members.
  const ClassCode& centroid(int class_index) const;
  std::vector<std::size_t> members(int class_index) const;
  std::vector<int> class_indices() const;
  const ManifoldEntry* find(std::string_view sample_id) const;
  // Entry whose code is nearest (Euclidean) to the given point.
  const ManifoldEntry& nearest(const ClassCode& point) const;

 private:
  std::vector<ManifoldEntry> entries_;
  std::map<int, ClassCode> centroids_;
  int dim_ = 0;
};

// Arithmetic mean; summation runs over codes in lexicographic order so the
// result does not depend on the order of the input.
ClassCode mean_code(std::vector<ClassCode> codes);
double euclidean(const ClassCode& a, const ClassCode& b);

ManifoldIndex build_index(std::span<const data::ImageSample> samples, const nets::CodeModel& model,
                          std::size_t batch_size = 64);

}  // namespace cae::manifold
