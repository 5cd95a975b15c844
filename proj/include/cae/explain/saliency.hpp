#pragma once

#include <vector>

#include "cae/explain/saliency_map.hpp"
#include "cae/explain/series.hpp"

namespace cae::explain {

// |frames[i+1] - frames[i]|, channel-summed; one map per consecutive pair.
std::vector<SaliencyMap> differential_maps(const CounterfactualSeries& series);

// max(0, gain in target-class probability) per step, normalised to sum 1;
// uniform when no step gains.
std::vector<double> series_weights(const CounterfactualSeries& series);

SaliencyMap saliency_weighted_series(const CounterfactualSeries& series);
SaliencyMap saliency_endpoint_contrast(const CounterfactualSeries& series);
SaliencyMap saliency(const CounterfactualSeries& series, SaliencyMode mode);

}  // namespace cae::explain
