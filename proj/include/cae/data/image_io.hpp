#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cae/common/image.hpp"

namespace cae::data {

// Decodes any format OpenCV understands into [0,1] floats with the requested
// channel count (1 = gray, 3 = RGB). Returns nullopt when the file cannot be decoded.
std::optional<Image> read_image(const std::filesystem::path& path, int channels);

// PNG with 8 or 16 bits per sample; values are clamped to [0,1] first.
void write_png(const std::filesystem::path& path, const Image& image, int bit_depth = 8);
std::vector<unsigned char> encode_png(const Image& image, int bit_depth = 8);
std::optional<Image> decode_png(const std::vector<unsigned char>& bytes, int channels);

// Horizontal strip of equally sized frames.
Image hstack(const std::vector<Image>& frames);

}  // namespace cae::data
