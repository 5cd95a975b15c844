#pragma once

#include <span>
#include <vector>

#include "cae/common/image.hpp"

namespace cae::nets {

/// Low-dimensional class-associated code.
struct ClassCode {
  std::vector<float> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const ClassCode&, const ClassCode&) = default;
};

/// Spatial individual code, channels x height x width, row-major.
struct IndividualCode {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> values;

  friend bool operator==(const IndividualCode&, const IndividualCode&) = default;
};

struct EncodedImage {
  ClassCode class_code;
  IndividualCode individual;
};

/// Encoder/decoder pair seen through plain value types.
class CodeModel {
 public:
  virtual ~CodeModel() = default;

  virtual int class_code_dim() const = 0;
  virtual std::vector<EncodedImage> encode(std::span<const Image> batch) const = 0;
  // Decodes (class_codes[i], individuals[i]) for every i; spans must have equal length.
  virtual std::vector<Image> decode(std::span<const ClassCode> class_codes,
                                    std::span<const IndividualCode> individuals) const = 0;

  EncodedImage encode(const Image& x) const { return encode(std::span<const Image>(&x, 1)).front(); }
  Image decode(const ClassCode& c, const IndividualCode& s) const {
    return decode(std::span<const ClassCode>(&c, 1), std::span<const IndividualCode>(&s, 1)).front();
  }
};

}  // namespace cae::nets
