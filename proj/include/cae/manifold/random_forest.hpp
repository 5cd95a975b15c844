#pragma once

#include <cstdint>
#include <vector>

namespace cae::manifold {

struct ForestParams {
  int trees = 100;
  int max_depth = -1;  // unlimited
  int min_samples_split = 2;
  int max_features = -1;  // -1: floor(sqrt(num_features)), at least 1
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

/// Gini CART forest with bootstrap resampling and per-split feature subsampling.
class RandomForest {
 public:
  explicit RandomForest(ForestParams params = {}) : params_(params) {}

  void fit(const std::vector<std::vector<double>>& features, const std::vector<int>& labels);
  int predict(const std::vector<double>& x) const;
  std::vector<int> predict(const std::vector<std::vector<double>>& xs) const;

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };
  using Tree = std::vector<Node>;

  ForestParams params_;
  int num_classes_ = 0;
  std::vector<Tree> trees_;
};

}  // namespace cae::manifold
