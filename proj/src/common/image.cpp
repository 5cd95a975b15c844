#include "cae/common/image.hpp"

#include <cmath>
#include <string>

namespace cae {

Image::Image(int h, int w, int c, float fill) : height(h), width(w), channels(c) {
  if (h < 0 || w < 0 || c < 0) throw ContractError("Image: negative dimension");
  pixels.assign(static_cast<std::size_t>(h) * w * c, fill);
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ContractError(std::string(what) + ": shape mismatch (" + std::to_string(a.height) + "x" +
                        std::to_string(a.width) + "x" + std::to_string(a.channels) + " vs " +
                        std::to_string(b.height) + "x" + std::to_string(b.width) + "x" +
                        std::to_string(b.channels) + ")");
  }
}

Image channel_summed_abs_diff(const Image& a, const Image& b) {
  require_same_shape(a, b, "channel_summed_abs_diff");
  Image out(a.height, a.width, 1);
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      float acc = 0.0f;
      for (int c = 0; c < a.channels; ++c) acc += std::fabs(a.at(y, x, c) - b.at(y, x, c));
      out.at(y, x) = acc;
    }
  }
  return out;
}

bool all_within_unit_range(const Image& image) {
  for (float v : image.pixels) {
    if (!(v >= 0.0f && v <= 1.0f)) return false;
  }
  return true;
}

}  // namespace cae
