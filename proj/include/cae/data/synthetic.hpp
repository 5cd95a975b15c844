#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cae/data/dataset.hpp"

namespace cae::data {

enum class MotifKind { none, disk, ring, stripes };

struct MotifSpec {
  MotifKind kind = MotifKind::disk;
  double radius = 6.0;
  double intensity = 0.9;
  double intensity_jitter = 0.03;
  double ring_width = 2.0;
  double stripe_period = 3.0;

  friend bool operator==(const MotifSpec&, const MotifSpec&) = default;
};

struct BackgroundSpec {
  double base_min = 0.35;
  double base_max = 0.65;
  // Peak-to-peak amplitude of the linear ramp across the image.
  double gradient_max = 0.15;
  double gradient_angle_min = 0.0;
  double gradient_angle_max = 6.283185307179586;
  // Amplitude and count of low-frequency sinusoidal texture components.
  double texture_scale = 0.05;
  int texture_waves = 3;
  double pixel_noise = 0.01;
};

/// Motif-on-background generator parameters. Each class draws its own motif;
/// the background distribution is shared across classes so the only class
/// signal in an image is the motif.
struct SyntheticSpec {
  std::vector<std::string> class_names{"dark", "bright"};
  std::vector<MotifSpec> motifs{MotifSpec{MotifKind::disk, 14.0, 0.08, 0.03},
                                MotifSpec{MotifKind::disk, 14.0, 0.92, 0.03}};
  int image_size = 64;
  int channels = 1;
  BackgroundSpec background;
  // Motif centres are drawn uniformly from [margin, image_size - 1 - margin]^2.
  int placement_margin = 14;
  int train_per_class = 1000;
  int test_per_class = 200;
  bool ground_truth_mask = true;
  // Ablation switch: false renders backgrounds only.
  bool motifs_enabled = true;
  std::uint64_t seed = 0;

  int num_classes() const noexcept { return static_cast<int>(class_names.size()); }
  // Throws ConfigError.
  void validate() const;
};

void to_json(nlohmann::json& j, const SyntheticSpec& s);
void from_json(const nlohmann::json& j, SyntheticSpec& s);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

struct RenderedSample {
  Image image;
  Image background;
  Image motif_layer;  // motif values inside the mask, 0 elsewhere
  Image mask;         // 1 inside the motif, 0 elsewhere
  int center_x = 0;
  int center_y = 0;
};

// Rasterises one motif (pixel centres inside the shape) onto a zero canvas.
void rasterize_motif(const MotifSpec& motif, int center_x, int center_y, float intensity,
                     Image& motif_layer, Image& mask);

RenderedSample render_sample(const SyntheticSpec& spec, int class_index, Rng& rng);

// Deterministic in spec (including seed). Masks are keyed by sample id when
// ground_truth_mask is set. Pixel values are quantised to k/255
// so that a PNG round trip is exact.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace cae::data
