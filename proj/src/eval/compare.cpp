#include "cae/eval/compare.hpp"

#include <algorithm>
#include <sstream>

namespace cae::eval {

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : rows) {
    table.push_back({{"method", r.method}, {"aopc", r.aopc}, {"pd", r.pd}, {"N", steps}, {"K", samples}, {"seed", seed}});
  }
  return {{"rows", table}, {"N", steps}, {"K", samples}, {"seed", seed}};
}

std::string ComparisonReport::curves_jsonl() const {
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t p = 0; p < r.curve.values.size(); ++p) {
      out << nlohmann::json{{"method", r.method}, {"p", p + 1}, {"degradation", r.curve.values[p]}}.dump() << "\n";
    }
  }
  return out.str();
}

ComparisonReport compare_methods(std::span<const data::ImageSample> samples, const std::vector<MethodSpec>& methods,
                                 const nets::BlackBoxClassifier& classifier, const PerturbationConfig& config) {
  config.validate();
  ComparisonReport report;
  report.steps = config.steps;
  report.samples = samples.size();
  report.seed = config.seed;
  for (const auto& method : methods) {
    std::vector<explain::SaliencyMap> maps;
    maps.reserve(samples.size());
    for (const auto& s : samples) maps.push_back(method.provider(s));
    MethodResult row;
    row.method = method.name;
    row.curve = degradation_curve(samples, maps, classifier, config);
    row.aopc = compute_aopc(row.curve);
    row.pd = compute_pd(row.curve);
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const MethodResult& a, const MethodResult& b) { return a.aopc > b.aopc; });
  return report;
}

}  // namespace cae::eval
