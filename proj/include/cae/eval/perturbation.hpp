#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cae/common/image.hpp"
#include "cae/explain/saliency_map.hpp"

namespace cae::eval {

struct PerturbationConfig {
  int patch_size = 7;
  int steps = 30;  // N, number of coverage levels
  std::uint64_t seed = 0;
  float fill_min = 0.0f;
  float fill_max = 1.0f;

  void validate() const;
};

struct PixelCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

// Descending saliency; ties in row-major order.
std::vector<PixelCoord> rank_pixels(const explain::SaliencyMap& map);

// Fill stream for one sample; every method evaluated on the sample draws the
// same fill values at the same coverage step.
std::uint64_t sample_stream_seed(std::uint64_t master_seed, std::string_view sample_id) noexcept;

/// Incremental patch covering: each step places the next ranked anchor that is
/// not yet covered and overwrites the patch around it (clipped at the borders)
/// with uniform random values.
class PatchCoverer {
 public:
  PatchCoverer(Image image, std::vector<PixelCoord> ranked, const PerturbationConfig& config,
               std::uint64_t stream_seed);

  // False when no uncovered anchor remains.
  bool step();

  const Image& image() const noexcept { return image_; }
  const std::vector<PixelCoord>& anchors() const noexcept { return anchors_; }
  std::size_t covered_pixels() const noexcept { return covered_count_; }
  bool is_covered(int row, int col) const { return covered_[static_cast<std::size_t>(row) * image_.width + col] != 0; }

 private:
  Image image_;
  std::vector<PixelCoord> ranked_;
  PerturbationConfig config_;
  std::uint64_t stream_seed_;
  std::vector<unsigned char> covered_;
  std::size_t covered_count_ = 0;
  std::size_t cursor_ = 0;
  std::vector<PixelCoord> anchors_;
};

struct CoverResult {
  Image image;
  std::vector<PixelCoord> anchors;
  std::size_t covered_pixels = 0;
  int shortfall = 0;  // requested anchors that could not be placed
};

CoverResult cover_patches(const Image& image, const std::vector<PixelCoord>& ranked, int p,
                          const PerturbationConfig& config, std::uint64_t stream_seed);

}  // namespace cae::eval
