#include "cae/manifold/path.hpp"

#include <string>

namespace cae::manifold {

std::string_view to_string(EndMode m) noexcept {
  switch (m) {
    case EndMode::class_centroid: return "class_centroid";
    case EndMode::counter_sample: return "counter_sample";
    case EndMode::custom_point: return "custom_point";
  }
  return "class_centroid";
}

ClassCode interpolate(const ClassCode& start, const ClassCode& end, double alpha, bool allow_extrapolation) {
  if (start.size() != end.size()) throw ContractError("interpolate: codes differ in length");
  if (!allow_extrapolation && !(alpha >= 0.0 && alpha <= 1.0)) {
    throw ContractError("interpolate: alpha must lie in [0,1]");
  }
  ClassCode out;
  out.values.resize(start.size());
  for (std::size_t k = 0; k < start.size(); ++k) {
    if (alpha == 0.0) {
      out.values[k] = start.values[k];
    } else if (alpha == 1.0) {
      out.values[k] = end.values[k];
    } else {
      out.values[k] = static_cast<float>((1.0 - alpha) * start.values[k] + alpha * end.values[k]);
    }
  }
  return out;
}

TransitionPath linear_path(const ClassCode& start, const ClassCode& end, int steps, EndMode mode) {
  if (steps < 1) throw ContractError("plan_path: steps must be >= 1");
  if (start.size() != end.size()) throw ContractError("plan_path: start and end differ in length");
  TransitionPath path{start, end, mode, steps, {}};
  path.codes.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    path.codes.push_back(interpolate(start, end, static_cast<double>(i) / steps));
  }
  return path;
}

TransitionPath plan_path(const ManifoldIndex& index, const ClassCode& start, const PathTarget& target, int steps) {
  if (const auto* t = std::get_if<ClassTarget>(&target)) {
    return linear_path(start, index.centroid(t->class_index), steps, EndMode::class_centroid);
  }
  if (const auto* t = std::get_if<SampleTarget>(&target)) {
    const ManifoldEntry* entry = index.find(t->sample_id);
    if (!entry) throw ContractError("plan_path: unknown sample id '" + t->sample_id + "'");
    return linear_path(start, entry->code, steps, EndMode::counter_sample);
  }
  return linear_path(start, std::get<PointTarget>(target).point, steps, EndMode::custom_point);
}

}  // namespace cae::manifold
