#pragma once

#include <optional>
#include <vector>

#include "cae/common/image.hpp"
#include "cae/manifold/path.hpp"
#include "cae/nets/blackbox.hpp"
#include "cae/nets/codes.hpp"

namespace cae::explain {

/// Frames decoded along a transition path with the classifier's view of each.
struct CounterfactualSeries {
  std::vector<Image> frames;  // frames[0] reconstructs the exemplar
  std::vector<nets::Probabilities> probs;
  std::optional<int> stop_index;  // first frame whose argmax is the target class
  int target_class = 0;

  double target_probability(std::size_t frame) const { return probs.at(frame).at(static_cast<std::size_t>(target_class)); }
};

struct GenerationOptions {
  bool stop_early = false;
  // Re-encode the individual code from the previous frame instead of holding
  // the exemplar's code fixed.
  bool recompute_individual = false;
  float start_tolerance = 1e-3f;
};

CounterfactualSeries generate_along_path(const Image& exemplar, const manifold::TransitionPath& path, int target_class,
                                         const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                                         const GenerationOptions& options = {});

}  // namespace cae::explain
