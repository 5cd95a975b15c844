#include "cae/manifold/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cae/common/random.hpp"

namespace cae::manifold {

std::string_view to_string(ProjectionMethod m) noexcept { return m == ProjectionMethod::pca ? "pca" : "tsne"; }

ProjectionMethod parse_projection(std::string_view text) {
  if (text == "pca" || text == "PCA") return ProjectionMethod::pca;
  if (text == "tsne" || text == "tSNE" || text == "t-sne") return ProjectionMethod::tsne;
  throw ContractError("unknown projection method '" + std::string(text) + "'");
}

namespace {

Eigen::MatrixXd to_matrix(const std::vector<ClassCode>& codes) {
  if (codes.size() < 2) throw ContractError("project: need at least two entries");
  const auto d = static_cast<Eigen::Index>(codes.front().size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(codes.size()), d);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (static_cast<Eigen::Index>(codes[i].size()) != d) throw ContractError("project: inconsistent code length");
    for (Eigen::Index k = 0; k < d; ++k) m(static_cast<Eigen::Index>(i), k) = codes[i].values[static_cast<std::size_t>(k)];
  }
  return m;
}

}  // namespace

Projection2D project_pca(const std::vector<ClassCode>& codes) {
  Eigen::MatrixXd x = to_matrix(codes);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(x.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::MatrixXd& vecs = solver.eigenvectors();  // ascending eigenvalues
  const Eigen::Index d = x.cols();

  Projection2D out;
  out.method = ProjectionMethod::pca;
  out.coords.assign(codes.size(), {0.0, 0.0});
  for (int axis = 0; axis < 2 && axis < d; ++axis) {
    Eigen::VectorXd v = vecs.col(d - 1 - axis);
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    if (v(peak) < 0) v = -v;
    const Eigen::VectorXd proj = x * v;
    for (Eigen::Index i = 0; i < x.rows(); ++i) out.coords[static_cast<std::size_t>(i)][axis] = proj(i);
  }
  return out;
}

Projection2D project_tsne(const std::vector<ClassCode>& codes, const TsneParams& params) {
  const Eigen::MatrixXd x = to_matrix(codes);
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).squaredNorm();
      d2[i * n + j] = d2[j * n + i] = v;
    }
  }

  // Conditional affinities with a per-point bandwidth matching the perplexity.
  const double perplexity = std::min(params.perplexity, std::max(1.0, (static_cast<double>(n) - 1.0) / 3.0));
  const double target_entropy = std::log(perplexity);
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = std::exp(-beta * d2[i * n + j]);
        p[i * n + j] = w;
        sum += w;
        weighted += w * d2[i * n + j];
      }
      if (sum <= 0.0) sum = std::numeric_limits<double>::min();
      const double entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) p[i * n + j] /= sum;
      const double diff = entropy - target_entropy;
      if (std::fabs(diff) < 1e-5) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
  }
  std::vector<double> pij(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      pij[i * n + j] = std::max((p[i * n + j] + p[j * n + i]) / (2.0 * static_cast<double>(n)), 1e-12);
    }
  }

  Rng rng(derive_seed(params.seed, "tsne"));
  std::vector<double> y(n * 2), velocity(n * 2, 0.0), gains(n * 2, 1.0), grad(n * 2);
  for (double& v : y) v = 1e-2 * standard_normal(rng);
  std::vector<double> num(n * n, 0.0);

  for (int iter = 0; iter < params.iterations; ++iter) {
    const double exaggeration = iter < params.exaggeration_iterations ? params.early_exaggeration : 1.0;
    const double momentum = iter < params.exaggeration_iterations ? 0.5 : 0.8;
    double zsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[2 * i] - y[2 * j];
        const double dy = y[2 * i + 1] - y[2 * j + 1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = num[j * n + i] = q;
        zsum += 2.0 * q;
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = num[i * n + j];
        const double mult = (exaggeration * pij[i * n + j] - q / zsum) * q;
        grad[2 * i] += 4.0 * mult * (y[2 * i] - y[2 * j]);
        grad[2 * i + 1] += 4.0 * mult * (y[2 * i + 1] - y[2 * j + 1]);
      }
    }
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const bool same_sign = (grad[k] > 0) == (velocity[k] > 0);
      gains[k] = std::max(same_sign ? gains[k] * 0.8 : gains[k] + 0.2, 0.01);
      velocity[k] = momentum * velocity[k] - params.learning_rate * gains[k] * grad[k];
      y[k] += velocity[k];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  }

  Projection2D out;
  out.method = ProjectionMethod::tsne;
  out.params = params;
  out.params.perplexity = perplexity;
  out.coords.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.coords[i] = {y[2 * i], y[2 * i + 1]};
  return out;
}

Projection2D project(const ManifoldIndex& index, ProjectionMethod method, const TsneParams& params) {
  std::vector<ClassCode> codes;
  codes.reserve(index.size());
  for (const auto& e : index.entries()) codes.push_back(e.code);
  return method == ProjectionMethod::pca ? project_pca(codes) : project_tsne(codes, params);
}

}  // namespace cae::manifold
