#include "cae/explain/saliency_map.hpp"

#include <algorithm>
#include <string>

namespace cae::explain {

std::string_view to_string(SaliencyMode mode) noexcept {
  switch (mode) {
    case SaliencyMode::weighted_series: return "weighted";
    case SaliencyMode::endpoint_contrast: return "endpoint";
    case SaliencyMode::baseline: return "baseline";
  }
  return "weighted";
}

SaliencyMode parse_mode(std::string_view text) {
  if (text == "weighted" || text == "weighted_series") return SaliencyMode::weighted_series;
  if (text == "endpoint" || text == "endpoint_contrast") return SaliencyMode::endpoint_contrast;
  throw ContractError("unknown saliency mode '" + std::string(text) + "'");
}

std::string_view to_string(Normalization n) noexcept { return n == Normalization::raw ? "raw" : "max1"; }

double SaliencyMap::total() const {
  double acc = 0.0;
  for (float v : values) acc += v;
  return acc;
}

double SaliencyMap::mass_fraction_inside(const Image& mask) const {
  if (mask.height != height || mask.width != width) throw ContractError("mass_fraction_inside: mask shape mismatch");
  double inside = 0.0;
  double total_mass = 0.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double v = at(y, x);
      total_mass += v;
      if (mask.at(y, x, 0) > 0.5f) inside += v;
    }
  }
  return total_mass > 0.0 ? inside / total_mass : 0.0;
}

Image SaliencyMap::to_image() const {
  Image out(height, width, 1);
  std::copy(values.begin(), values.end(), out.pixels.begin());
  return out;
}

SaliencyMap normalized_max1(const SaliencyMap& map) {
  SaliencyMap out = map;
  out.normalization = Normalization::max1;
  const float peak = map.values.empty() ? 0.0f : *std::max_element(map.values.begin(), map.values.end());
  if (peak > 0.0f) {
    for (float& v : out.values) v /= peak;
  }
  return out;
}

SaliencyMap from_single_channel(const Image& image, SaliencyMode mode) {
  if (image.channels != 1) throw ContractError("from_single_channel: expected one channel");
  SaliencyMap out(image.height, image.width, mode);
  std::copy(image.pixels.begin(), image.pixels.end(), out.values.begin());
  return out;
}

}  // namespace cae::explain
