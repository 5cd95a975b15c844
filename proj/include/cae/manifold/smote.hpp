#pragma once

#include <vector>

#include "cae/common/random.hpp"
#include "cae/manifold/index.hpp"
#include "cae/manifold/path.hpp"

namespace cae::manifold {

// member + u * (neighbor - member).
ClassCode smote_point(const ClassCode& member, const ClassCode& neighbor, double u);

// k nearest same-class neighbours (Euclidean, excluding the point itself), ties by index.
std::vector<std::size_t> nearest_neighbors(const std::vector<ClassCode>& codes, std::size_t i, std::size_t k);

// `count` synthetic codes for one class. Throws ContractError when the class
// has fewer than k_neighbors + 1 members.
std::vector<ClassCode> smote_resample(const ManifoldIndex& index, int class_index, std::size_t count,
                                      std::size_t k_neighbors, Rng& rng);

}  // namespace cae::manifold
