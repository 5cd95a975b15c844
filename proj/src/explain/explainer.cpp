#include "cae/explain/explainer.hpp"

namespace cae::explain {

void Explainer::require_ready() const {
  if (!model_ || !classifier_ || !index_ || index_->empty()) {
    throw StateError("explainer: checkpoint, classifier and manifold index must be loaded");
  }
}

int Explainer::resolve_target_class(const manifold::PathTarget& target) const {
  require_ready();
  if (const auto* t = std::get_if<manifold::ClassTarget>(&target)) return t->class_index;
  if (const auto* t = std::get_if<manifold::SampleTarget>(&target)) {
    const auto* entry = index_->find(t->sample_id);
    if (!entry) throw ContractError("explain: unknown sample id '" + t->sample_id + "'");
    return entry->label.index;
  }
  return index_->nearest(std::get<manifold::PointTarget>(target).point).label.index;
}

Explanation Explainer::explain(const Image& exemplar, const manifold::PathTarget& target,
                               const ExplainConfig& config) const {
  require_ready();
  const int target_class = resolve_target_class(target);
  const nets::EncodedImage encoded = model_->encode(exemplar);
  Explanation out;
  out.path = manifold::plan_path(*index_, encoded.class_code, target, config.steps);
  GenerationOptions options;
  options.stop_early = config.stop_early;
  options.recompute_individual = config.recompute_individual;
  out.series = generate_along_path(exemplar, out.path, target_class, *model_, *classifier_, options);
  if (out.series.frames.size() < 2) {
    // Already at the target class with early stopping: nothing changes.
    out.saliency = SaliencyMap(exemplar.height, exemplar.width, config.mode);
  } else {
    out.saliency = saliency(out.series, config.mode);
  }
  if (config.normalization == Normalization::max1) out.saliency = normalized_max1(out.saliency);
  return out;
}

Explanation Explainer::explain_sample(const data::ImageSample& exemplar, const data::ClassLabel& target,
                                      const ExplainConfig& config) const {
  return explain(exemplar.pixels, manifold::ClassTarget{target.index}, config);
}

std::vector<Explanation> Explainer::explain_counter_classes(const data::ImageSample& exemplar,
                                                            const ExplainConfig& config) const {
  require_ready();
  std::vector<Explanation> out;
  for (int k : index_->class_indices()) {
    if (k != exemplar.label.index) out.push_back(explain(exemplar.pixels, manifold::ClassTarget{k}, config));
  }
  return out;
}

}  // namespace cae::explain
