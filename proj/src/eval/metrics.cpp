#include "cae/eval/metrics.hpp"

#include <algorithm>

namespace cae::eval {

std::vector<double> perturbation_probabilities(const data::ImageSample& sample, const explain::SaliencyMap& map,
                                               const nets::BlackBoxClassifier& classifier,
                                               const PerturbationConfig& config, int* shortfall) {
  config.validate();
  if (map.height != sample.pixels.height || map.width != sample.pixels.width) {
    throw ContractError("degradation_curve: saliency map does not match sample '" + sample.id + "'");
  }
  PatchCoverer coverer(sample.pixels, rank_pixels(map), config, sample_stream_seed(config.seed, sample.id));
  std::vector<Image> levels;
  levels.reserve(static_cast<std::size_t>(config.steps) + 1);
  levels.push_back(sample.pixels);
  int missing = 0;
  for (int p = 1; p <= config.steps; ++p) {
    if (!coverer.step()) ++missing;
    levels.push_back(coverer.image());
  }
  if (shortfall) *shortfall = missing;
  const auto probs = classifier.classify(levels);
  std::vector<double> out;
  out.reserve(probs.size());
  const auto gt = static_cast<std::size_t>(sample.label.index);
  for (const auto& p : probs) out.push_back(p.at(gt));
  return out;
}

DegradationCurve curve_from_probabilities(const std::vector<std::vector<double>>& tracks) {
  DegradationCurve curve;
  curve.samples = tracks.size();
  if (tracks.empty()) return curve;
  const std::size_t n = tracks.front().size();
  if (n < 2) throw ContractError("degradation_curve: tracks need at least p = 0 and p = 1");
  curve.values.assign(n - 1, 0.0);
  for (const auto& t : tracks) {
    if (t.size() != n) throw ContractError("degradation_curve: ragged probability tracks");
    for (std::size_t p = 1; p < n; ++p) curve.values[p - 1] += t[0] - t[p];
  }
  for (double& v : curve.values) v /= static_cast<double>(tracks.size());
  return curve;
}

DegradationCurve degradation_curve(std::span<const data::ImageSample> samples,
                                   std::span<const explain::SaliencyMap> maps,
                                   const nets::BlackBoxClassifier& classifier, const PerturbationConfig& config) {
  if (samples.size() != maps.size()) throw ContractError("degradation_curve: one map per sample required");
  std::vector<std::vector<double>> tracks;
  tracks.reserve(samples.size());
  std::size_t short_samples = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    int shortfall = 0;
    tracks.push_back(perturbation_probabilities(samples[i], maps[i], classifier, config, &shortfall));
    if (shortfall > 0) ++short_samples;
  }
  DegradationCurve curve = curve_from_probabilities(tracks);
  if (samples.empty()) curve.values.assign(static_cast<std::size_t>(config.steps), 0.0);
  curve.shortfall_samples = short_samples;
  return curve;
}

double compute_aopc(const DegradationCurve& curve) {
  if (curve.values.empty()) throw ContractError("compute_aopc: empty curve");
  double acc = 0.0;
  for (double v : curve.values) acc += v;
  return acc / static_cast<double>(curve.values.size());
}

double compute_pd(const DegradationCurve& curve) {
  if (curve.values.empty()) throw ContractError("compute_pd: empty curve");
  return *std::max_element(curve.values.begin(), curve.values.end());
}

}  // namespace cae::eval
