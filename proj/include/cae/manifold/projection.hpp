#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cae/manifold/index.hpp"

namespace cae::manifold {

enum class ProjectionMethod { pca, tsne };

std::string_view to_string(ProjectionMethod m) noexcept;
ProjectionMethod parse_projection(std::string_view text);

struct TsneParams {
  double perplexity = 30.0;
  int iterations = 750;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  std::uint64_t seed = 0;
};

struct Projection2D {
  ProjectionMethod method = ProjectionMethod::pca;
  std::vector<std::array<double, 2>> coords;
  TsneParams params;
};

// Exact PCA: top two principal axes of the mean-centred codes, each axis signed
// so its largest-magnitude loading is positive.
Projection2D project_pca(const std::vector<ClassCode>& codes);
// Exact (O(n^2)) t-SNE, reproducible for a fixed seed.
Projection2D project_tsne(const std::vector<ClassCode>& codes, const TsneParams& params);

Projection2D project(const ManifoldIndex& index, ProjectionMethod method, const TsneParams& params = {});

}  // namespace cae::manifold
