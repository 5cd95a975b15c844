#include "cae/eval/perturbation.hpp"

#include <algorithm>
#include <numeric>

#include "cae/common/random.hpp"

namespace cae::eval {

void PerturbationConfig::validate() const {
  if (patch_size < 1 || patch_size % 2 == 0) throw ContractError("perturbation: patch_size must be odd and positive");
  if (steps < 1) throw ContractError("perturbation: N must be >= 1");
  if (!(fill_min <= fill_max)) throw ContractError("perturbation: fill range is empty");
}

std::vector<PixelCoord> rank_pixels(const explain::SaliencyMap& map) {
  std::vector<std::size_t> order(map.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return map.values[a] > map.values[b]; });
  std::vector<PixelCoord> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back({static_cast<int>(i / map.width), static_cast<int>(i % map.width)});
  return out;
}

std::uint64_t sample_stream_seed(std::uint64_t master_seed, std::string_view sample_id) noexcept {
  return derive_seed(master_seed, sample_id);
}

PatchCoverer::PatchCoverer(Image image, std::vector<PixelCoord> ranked, const PerturbationConfig& config,
                           std::uint64_t stream_seed)
    : image_(std::move(image)),
      ranked_(std::move(ranked)),
      config_(config),
      stream_seed_(stream_seed),
      covered_(image_.pixel_count(), 0) {
  config_.validate();
}

bool PatchCoverer::step() {
  while (cursor_ < ranked_.size() && is_covered(ranked_[cursor_].row, ranked_[cursor_].col)) ++cursor_;
  if (cursor_ >= ranked_.size()) return false;
  const PixelCoord anchor = ranked_[cursor_++];
  anchors_.push_back(anchor);

  // The fill block is drawn in full (patch x patch x channels) before clipping
  // so that the value at a given patch offset depends only on the step index.
  const int half = config_.patch_size / 2;
  Rng rng(derive_seed(stream_seed_, static_cast<std::uint64_t>(anchors_.size())));
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      const int y = anchor.row + dy;
      const int x = anchor.col + dx;
      const bool inside = y >= 0 && y < image_.height && x >= 0 && x < image_.width;
      for (int c = 0; c < image_.channels; ++c) {
        const auto v = static_cast<float>(uniform(rng, config_.fill_min, config_.fill_max));
        if (inside) image_.at(y, x, c) = v;
      }
      if (inside) {
        auto& flag = covered_[static_cast<std::size_t>(y) * image_.width + x];
        if (!flag) {
          flag = 1;
          ++covered_count_;
        }
      }
    }
  }
  return true;
}

CoverResult cover_patches(const Image& image, const std::vector<PixelCoord>& ranked, int p,
                          const PerturbationConfig& config, std::uint64_t stream_seed) {
  if (p < 0) throw ContractError("cover_patches: p must be non-negative");
  PatchCoverer coverer(image, ranked, config, stream_seed);
  int placed = 0;
  while (placed < p && coverer.step()) ++placed;
  return {coverer.image(), coverer.anchors(), coverer.covered_pixels(), p - placed};
}

}  // namespace cae::eval
