#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cae/eval/metrics.hpp"

namespace cae::eval {

using SaliencyProvider = std::function<explain::SaliencyMap(const data::ImageSample&)>;

struct MethodSpec {
  std::string name;
  SaliencyProvider provider;
};

struct MethodResult {
  std::string method;
  double aopc = 0.0;
  double pd = 0.0;
  DegradationCurve curve;
};

struct ComparisonReport {
  std::vector<MethodResult> rows;  // ranked by AOPC, descending
  int steps = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  // One line-delimited record per (method, p).
  std::string curves_jsonl() const;
};

// Fill streams depend only on (config.seed, sample id), so methods are compared
// on identical perturbation noise.
ComparisonReport compare_methods(std::span<const data::ImageSample> samples, const std::vector<MethodSpec>& methods,
                                 const nets::BlackBoxClassifier& classifier, const PerturbationConfig& config);

}  // namespace cae::eval
