#pragma once

#include <vector>

#include "cae/data/dataset.hpp"
#include "cae/explain/saliency.hpp"
#include "cae/manifold/index.hpp"
#include "cae/manifold/path.hpp"

namespace cae::explain {

struct ExplainConfig {
  int steps = 10;
  SaliencyMode mode = SaliencyMode::weighted_series;
  Normalization normalization = Normalization::raw;
  bool stop_early = false;
  bool recompute_individual = false;
};

struct Explanation {
  manifold::TransitionPath path;
  CounterfactualSeries series;
  SaliencyMap saliency;
};

/// encode -> plan path -> generate along path -> saliency, over borrowed,
/// read-only model, classifier and index.
class Explainer {
 public:
  Explainer(const nets::CodeModel* model, const nets::BlackBoxClassifier* classifier,
            const manifold::ManifoldIndex* index)
      : model_(model), classifier_(classifier), index_(index) {}

  // Target class follows the target: the class itself, the named sample's
  // label, or the label of the entry nearest a custom point.
  Explanation explain(const Image& exemplar, const manifold::PathTarget& target, const ExplainConfig& config) const;
  Explanation explain_sample(const data::ImageSample& exemplar, const data::ClassLabel& target,
                             const ExplainConfig& config) const;
  // One explanation per class other than the exemplar's own.
  std::vector<Explanation> explain_counter_classes(const data::ImageSample& exemplar, const ExplainConfig& config) const;

  int resolve_target_class(const manifold::PathTarget& target) const;

 private:
  void require_ready() const;

  const nets::CodeModel* model_;
  const nets::BlackBoxClassifier* classifier_;
  const manifold::ManifoldIndex* index_;
};

}  // namespace cae::explain
