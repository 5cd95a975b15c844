#include "cae/explain/series.hpp"

#include <cmath>

namespace cae::explain {

CounterfactualSeries generate_along_path(const Image& exemplar, const manifold::TransitionPath& path, int target_class,
                                         const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                                         const GenerationOptions& options) {
  if (path.codes.size() < 2) throw ContractError("generate_along_path: path needs at least two codes");
  if (target_class < 0 || target_class >= classifier.num_classes()) {
    throw ContractError("generate_along_path: target class out of range");
  }
  const nets::EncodedImage encoded = model.encode(exemplar);
  const auto& c = encoded.class_code.values;
  const auto& start = path.codes.front().values;
  if (start.size() != c.size()) throw ContractError("generate_along_path: path code length differs from model");
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (std::fabs(start[k] - c[k]) > options.start_tolerance * (1.0f + std::fabs(c[k]))) {
      throw ContractError("generate_along_path: path does not start at the exemplar's class code");
    }
  }

  CounterfactualSeries series;
  series.target_class = target_class;
  if (!options.recompute_individual) {
    std::vector<nets::IndividualCode> carriers(path.codes.size(), encoded.individual);
    series.frames = model.decode(path.codes, carriers);
    series.probs = classifier.classify(series.frames);
  } else {
    nets::IndividualCode s = encoded.individual;
    for (std::size_t i = 0; i < path.codes.size(); ++i) {
      series.frames.push_back(model.decode(path.codes[i], s));
      s = model.encode(series.frames.back()).individual;
    }
    series.probs = classifier.classify(series.frames);
  }

  for (std::size_t i = 0; i < series.probs.size(); ++i) {
    if (nets::argmax(series.probs[i]) == static_cast<std::size_t>(target_class)) {
      series.stop_index = static_cast<int>(i);
      break;
    }
  }
  if (options.stop_early && series.stop_index) {
    const auto keep = static_cast<std::size_t>(*series.stop_index) + 1;
    series.frames.resize(keep);
    series.probs.resize(keep);
  }
  return series;
}

}  // namespace cae::explain
