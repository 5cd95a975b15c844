#include "cae/manifold/smote.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace cae::manifold {

ClassCode smote_point(const ClassCode& member, const ClassCode& neighbor, double u) {
  return interpolate(member, neighbor, u);
}

std::vector<std::size_t> nearest_neighbors(const std::vector<ClassCode>& codes, std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(codes.size());
  for (std::size_t j = 0; j < codes.size(); ++j) {
    if (j != i) dist.emplace_back(euclidean(codes[i], codes[j]), j);
  }
  const std::size_t take = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < take; ++n) out.push_back(dist[n].second);
  return out;
}

std::vector<ClassCode> smote_resample(const ManifoldIndex& index, int class_index, std::size_t count,
                                      std::size_t k_neighbors, Rng& rng) {
  if (k_neighbors < 1) throw ContractError("smote_resample: k_neighbors must be >= 1");
  std::vector<ClassCode> members;
  for (std::size_t i : index.members(class_index)) members.push_back(index.entries()[i].code);
  if (members.size() < k_neighbors + 1) {
    throw ContractError("smote_resample: class " + std::to_string(class_index) + " has " +
                        std::to_string(members.size()) + " members, need " + std::to_string(k_neighbors + 1));
  }
  std::vector<std::vector<std::size_t>> neighbors(members.size());
  std::vector<ClassCode> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t m = uniform_index(rng, members.size());
    if (neighbors[m].empty()) neighbors[m] = nearest_neighbors(members, m, k_neighbors);
    const std::size_t nb = neighbors[m][uniform_index(rng, neighbors[m].size())];
    out.push_back(smote_point(members[m], members[nb], uniform01(rng)));
  }
  return out;
}

}  // namespace cae::manifold
