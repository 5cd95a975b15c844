#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cae/common/image.hpp"
#include "cae/explain/saliency_map.hpp"

namespace cae::service {

std::string base64_encode(const std::vector<unsigned char>& bytes);
// Throws ContractError on characters outside the standard alphabet or bad padding.
std::vector<unsigned char> base64_decode(std::string_view text);

// 16-bit PNG, base64 encoded. Lossless for values of the form k / 65535.
std::string encode_image(const Image& image);
Image decode_image(std::string_view payload, int channels);

// Heatmap scaled by its maximum so it fills the 16-bit range; the raw values
// travel separately.
std::string encode_heatmap(const explain::SaliencyMap& map);

}  // namespace cae::service
