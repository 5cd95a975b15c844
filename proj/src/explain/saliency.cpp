#include "cae/explain/saliency.hpp"

#include <algorithm>

namespace cae::explain {

namespace {

void require_frames(const CounterfactualSeries& series, const char* what) {
  if (series.frames.size() < 2) throw ContractError(std::string(what) + ": need at least two frames");
}

}  // namespace

std::vector<SaliencyMap> differential_maps(const CounterfactualSeries& series) {
  require_frames(series, "differential_maps");
  std::vector<SaliencyMap> maps;
  maps.reserve(series.frames.size() - 1);
  for (std::size_t i = 0; i + 1 < series.frames.size(); ++i) {
    maps.push_back(from_single_channel(channel_summed_abs_diff(series.frames[i + 1], series.frames[i]),
                                       SaliencyMode::weighted_series));
  }
  return maps;
}

std::vector<double> series_weights(const CounterfactualSeries& series) {
  require_frames(series, "series_weights");
  if (series.probs.size() != series.frames.size()) throw ContractError("series_weights: probs/frames length mismatch");
  std::vector<double> w(series.frames.size() - 1, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::max(0.0, series.target_probability(i + 1) - series.target_probability(i));
    total += w[i];
  }
  if (total > 0.0) {
    for (double& v : w) v /= total;
  } else {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
  }
  return w;
}

SaliencyMap saliency_weighted_series(const CounterfactualSeries& series) {
  const auto maps = differential_maps(series);
  const auto weights = series_weights(series);
  SaliencyMap out(maps.front().height, maps.front().width, SaliencyMode::weighted_series);
  std::vector<double> acc(out.values.size(), 0.0);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += weights[i] * maps[i].values[k];
  }
  for (std::size_t k = 0; k < acc.size(); ++k) out.values[k] = static_cast<float>(acc[k]);
  return out;
}

SaliencyMap saliency_endpoint_contrast(const CounterfactualSeries& series) {
  require_frames(series, "saliency_endpoint_contrast");
  return from_single_channel(channel_summed_abs_diff(series.frames.back(), series.frames.front()),
                             SaliencyMode::endpoint_contrast);
}

SaliencyMap saliency(const CounterfactualSeries& series, SaliencyMode mode) {
  switch (mode) {
    case SaliencyMode::weighted_series: return saliency_weighted_series(series);
    case SaliencyMode::endpoint_contrast: return saliency_endpoint_contrast(series);
    case SaliencyMode::baseline: break;
  }
  throw ContractError("saliency: baseline mode is not a series reduction");
}

}  // namespace cae::explain
