#include "cae/manifold/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "cae/common/errors.hpp"
#include "cae/common/random.hpp"

namespace cae::manifold {

namespace {

int majority(const std::vector<int>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double acc = 1.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / total;
    acc -= p * p;
  }
  return acc;
}

}  // namespace

void RandomForest::fit(const std::vector<std::vector<double>>& features, const std::vector<int>& labels) {
  if (features.empty() || features.size() != labels.size()) throw ContractError("RandomForest::fit: bad input sizes");
  const std::size_t n = features.size();
  const int d = static_cast<int>(features.front().size());
  num_classes_ = *std::max_element(labels.begin(), labels.end()) + 1;
  const int max_features =
      params_.max_features > 0 ? std::min(params_.max_features, d)
                               : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
  trees_.clear();
  trees_.reserve(static_cast<std::size_t>(params_.trees));

  for (int t = 0; t < params_.trees; ++t) {
    Rng rng(derive_seed(params_.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(n);
    if (params_.bootstrap) {
      for (auto& r : rows) r = uniform_index(rng, n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }

    Tree tree;
    struct Pending {
      int node;
      std::vector<std::size_t> rows;
      int depth;
    };
    std::vector<Pending> stack;
    tree.push_back({});
    stack.push_back({0, std::move(rows), 0});
    std::vector<int> feature_ids(static_cast<std::size_t>(d));

    while (!stack.empty()) {
      Pending job = std::move(stack.back());
      stack.pop_back();
      std::vector<int> counts(static_cast<std::size_t>(num_classes_), 0);
      for (std::size_t r : job.rows) ++counts[static_cast<std::size_t>(labels[r])];
      tree[job.node].label = majority(counts);
      const int total = static_cast<int>(job.rows.size());
      const bool pure = std::count(counts.begin(), counts.end(), 0) == num_classes_ - 1;
      if (pure || total < params_.min_samples_split || (params_.max_depth >= 0 && job.depth >= params_.max_depth)) {
        continue;
      }

      std::iota(feature_ids.begin(), feature_ids.end(), 0);
      for (int k = 0; k < max_features; ++k) {
        const std::size_t pick = k + uniform_index(rng, static_cast<std::size_t>(d - k));
        std::swap(feature_ids[static_cast<std::size_t>(k)], feature_ids[pick]);
      }

      double best_score = gini(counts, total);
      int best_feature = -1;
      double best_threshold = 0.0;
      std::vector<std::pair<double, int>> column(job.rows.size());
      for (int k = 0; k < max_features; ++k) {
        const int f = feature_ids[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < job.rows.size(); ++i) {
          column[i] = {features[job.rows[i]][static_cast<std::size_t>(f)], labels[job.rows[i]]};
        }
        std::sort(column.begin(), column.end());
        std::vector<int> left(static_cast<std::size_t>(num_classes_), 0);
        std::vector<int> right = counts;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
          ++left[static_cast<std::size_t>(column[i].second)];
          --right[static_cast<std::size_t>(column[i].second)];
          if (column[i].first == column[i + 1].first) continue;
          const int nl = static_cast<int>(i + 1);
          const int nr = total - nl;
          const double score = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
          if (score < best_score - 1e-12) {
            best_score = score;
            best_feature = f;
            best_threshold = 0.5 * (column[i].first + column[i + 1].first);
          }
        }
      }
      if (best_feature < 0) continue;

      std::vector<std::size_t> lrows, rrows;
      for (std::size_t r : job.rows) {
        (features[r][static_cast<std::size_t>(best_feature)] <= best_threshold ? lrows : rrows).push_back(r);
      }
      const int left_id = static_cast<int>(tree.size());
      tree.push_back({});
      tree.push_back({});
      tree[job.node].feature = best_feature;
      tree[job.node].threshold = best_threshold;
      tree[job.node].left = left_id;
      tree[job.node].right = left_id + 1;
      stack.push_back({left_id, std::move(lrows), job.depth + 1});
      stack.push_back({left_id + 1, std::move(rrows), job.depth + 1});
    }
    trees_.push_back(std::move(tree));
  }
}

int RandomForest::predict(const std::vector<double>& x) const {
  if (trees_.empty()) throw StateError("RandomForest::predict: not fitted");
  std::vector<int> votes(static_cast<std::size_t>(num_classes_), 0);
  for (const auto& tree : trees_) {
    int node = 0;
    while (tree[static_cast<std::size_t>(node)].feature >= 0) {
      const Node& nd = tree[static_cast<std::size_t>(node)];
      node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    ++votes[static_cast<std::size_t>(tree[static_cast<std::size_t>(node)].label)];
  }
  return majority(votes);
}

std::vector<int> RandomForest::predict(const std::vector<std::vector<double>>& xs) const {
  std::vector<int> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(x));
  return out;
}

}  // namespace cae::manifold
