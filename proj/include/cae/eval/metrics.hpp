#pragma once

#include <span>
#include <vector>

#include "cae/data/dataset.hpp"
#include "cae/eval/perturbation.hpp"
#include "cae/nets/blackbox.hpp"

namespace cae::eval {

/// Mean drop of the ground-truth-class probability at p = 1..N covered patches.
struct DegradationCurve {
  std::vector<double> values;
  std::size_t samples = 0;
  std::size_t shortfall_samples = 0;
};

// Probability of the ground-truth class at p = 0..N for one sample.
std::vector<double> perturbation_probabilities(const data::ImageSample& sample, const explain::SaliencyMap& map,
                                               const nets::BlackBoxClassifier& classifier,
                                               const PerturbationConfig& config, int* shortfall = nullptr);

DegradationCurve degradation_curve(std::span<const data::ImageSample> samples,
                                   std::span<const explain::SaliencyMap> maps,
                                   const nets::BlackBoxClassifier& classifier, const PerturbationConfig& config);

// Curve from per-sample probability tracks (each of length N + 1).
DegradationCurve curve_from_probabilities(const std::vector<std::vector<double>>& tracks);

double compute_aopc(const DegradationCurve& curve);
double compute_pd(const DegradationCurve& curve);

}  // namespace cae::eval
