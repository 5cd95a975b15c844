#pragma once

#include <string_view>
#include <vector>

#include "cae/common/image.hpp"

namespace cae::explain {

enum class SaliencyMode { weighted_series, endpoint_contrast, baseline };
enum class Normalization { raw, max1 };

std::string_view to_string(SaliencyMode mode) noexcept;
SaliencyMode parse_mode(std::string_view text);
std::string_view to_string(Normalization n) noexcept;

/// Non-negative per-pixel attribution grid.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;
  SaliencyMode mode = SaliencyMode::weighted_series;
  Normalization normalization = Normalization::raw;

  SaliencyMap() = default;
  SaliencyMap(int h, int w, SaliencyMode m) : height(h), width(w), values(static_cast<std::size_t>(h) * w, 0.0f), mode(m) {}

  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
  float& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }

  double total() const;
  // Fraction of total mass on pixels where mask > 0.5; 0 for an all-zero map.
  double mass_fraction_inside(const Image& mask) const;
  Image to_image() const;
};

// Copy scaled so the maximum is 1, unless the map is all zero.
SaliencyMap normalized_max1(const SaliencyMap& map);
SaliencyMap from_single_channel(const Image& image, SaliencyMode mode);

}  // namespace cae::explain
