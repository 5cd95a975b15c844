#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cae/manifold/index.hpp"

namespace cae::manifold {

enum class EndMode { class_centroid, counter_sample, custom_point };

std::string_view to_string(EndMode m) noexcept;

struct ClassTarget {
  int class_index = 0;
};
struct SampleTarget {
  std::string sample_id;
};
struct PointTarget {
  ClassCode point;
};
using PathTarget = std::variant<ClassTarget, SampleTarget, PointTarget>;

struct TransitionPath {
  ClassCode start;
  ClassCode end;
  EndMode end_mode = EndMode::class_centroid;
  int steps = 1;
  std::vector<ClassCode> codes;  // steps + 1 codes, codes[0] = start, codes[steps] = end
};

// (1 - alpha) * start + alpha * end. alpha outside [0, 1] requires allow_extrapolation.
ClassCode interpolate(const ClassCode& start, const ClassCode& end, double alpha, bool allow_extrapolation = false);

TransitionPath linear_path(const ClassCode& start, const ClassCode& end, int steps, EndMode mode);

TransitionPath plan_path(const ManifoldIndex& index, const ClassCode& start, const PathTarget& target, int steps);

}  // namespace cae::manifold
