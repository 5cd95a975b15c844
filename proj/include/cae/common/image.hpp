#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cae/common/errors.hpp"

namespace cae {

/// Dense H x W x C grid of floats, row-major with interleaved channels.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int h, int w, int c, float fill = 0.0f);

  std::size_t size() const noexcept { return pixels.size(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  bool empty() const noexcept { return pixels.empty(); }

  std::size_t index(int y, int x, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  float& at(int y, int x, int c = 0) { return pixels[index(y, x, c)]; }
  float at(int y, int x, int c = 0) const { return pixels[index(y, x, c)]; }

  bool same_shape(const Image& other) const noexcept {
    return height == other.height && width == other.width && channels == other.channels;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Throws ContractError when the two images differ in shape.
void require_same_shape(const Image& a, const Image& b, const char* what);

// Per-pixel sum over channels of |a - b|; result is single-channel.
Image channel_summed_abs_diff(const Image& a, const Image& b);

bool all_within_unit_range(const Image& image);

}  // namespace cae
