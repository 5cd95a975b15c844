#include "cae/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

namespace cae::data {

namespace {

float quantize(double v) {
  return static_cast<float>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)) / 255.0f;
}

std::string kind_name(MotifKind k) {
  switch (k) {
    case MotifKind::none: return "none";
    case MotifKind::disk: return "disk";
    case MotifKind::ring: return "ring";
    case MotifKind::stripes: return "stripes";
  }
  return "none";
}

MotifKind parse_kind(const std::string& s) {
  if (s == "none") return MotifKind::none;
  if (s == "disk") return MotifKind::disk;
  if (s == "ring") return MotifKind::ring;
  if (s == "stripes") return MotifKind::stripes;
  throw ConfigError("unknown motif kind '" + s + "'");
}

}  // namespace

void SyntheticSpec::validate() const {
  if (class_names.size() < 2) throw ConfigError("synthetic: need at least two classes");
  if (motifs.size() != class_names.size()) throw ConfigError("synthetic: one motif per class required");
  if (std::set<std::string>(class_names.begin(), class_names.end()).size() != class_names.size()) {
    throw ConfigError("synthetic: class names must be unique");
  }
  for (std::size_t i = 0; i < motifs.size(); ++i) {
    for (std::size_t j = i + 1; j < motifs.size(); ++j) {
      if (motifs[i] == motifs[j]) throw ConfigError("synthetic: classes must have distinct motif parameters");
    }
  }
  if (image_size < 8) throw ConfigError("synthetic: image_size too small");
  if (channels != 1 && channels != 3) throw ConfigError("synthetic: channels must be 1 or 3");
  if (placement_margin < 0 || 2 * placement_margin > image_size - 1) {
    throw ConfigError("synthetic: placement margin leaves no room for motifs");
  }
  if (train_per_class < 0 || test_per_class < 0) throw ConfigError("synthetic: negative sample count");
  if (background.base_min > background.base_max) throw ConfigError("synthetic: base_min > base_max");
}

void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  nlohmann::json motifs = nlohmann::json::array();
  for (const auto& m : s.motifs) {
    motifs.push_back({{"kind", kind_name(m.kind)},
                      {"radius", m.radius},
                      {"intensity", m.intensity},
                      {"intensity_jitter", m.intensity_jitter},
                      {"ring_width", m.ring_width},
                      {"stripe_period", m.stripe_period}});
  }
  const auto& b = s.background;
  j = {{"class_names", s.class_names},
       {"motifs", motifs},
       {"image_size", s.image_size},
       {"channels", s.channels},
       {"background",
        {{"base_min", b.base_min},
         {"base_max", b.base_max},
         {"gradient_max", b.gradient_max},
         {"gradient_angle_min", b.gradient_angle_min},
         {"gradient_angle_max", b.gradient_angle_max},
         {"texture_scale", b.texture_scale},
         {"texture_waves", b.texture_waves},
         {"pixel_noise", b.pixel_noise}}},
       {"placement_margin", s.placement_margin},
       {"train_per_class", s.train_per_class},
       {"test_per_class", s.test_per_class},
       {"ground_truth_mask", s.ground_truth_mask},
       {"motifs_enabled", s.motifs_enabled},
       {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  SyntheticSpec d;
  s.class_names = j.value("class_names", d.class_names);
  if (j.contains("motifs")) {
    s.motifs.clear();
    for (const auto& m : j.at("motifs")) {
      MotifSpec ms;
      ms.kind = parse_kind(m.value("kind", std::string("disk")));
      ms.radius = m.value("radius", ms.radius);
      ms.intensity = m.value("intensity", ms.intensity);
      ms.intensity_jitter = m.value("intensity_jitter", ms.intensity_jitter);
      ms.ring_width = m.value("ring_width", ms.ring_width);
      ms.stripe_period = m.value("stripe_period", ms.stripe_period);
      s.motifs.push_back(ms);
    }
  } else {
    s.motifs = d.motifs;
  }
  s.image_size = j.value("image_size", d.image_size);
  s.channels = j.value("channels", d.channels);
  if (j.contains("background")) {
    const auto& b = j.at("background");
    auto& o = s.background;
    o.base_min = b.value("base_min", o.base_min);
    o.base_max = b.value("base_max", o.base_max);
    o.gradient_max = b.value("gradient_max", o.gradient_max);
    o.gradient_angle_min = b.value("gradient_angle_min", o.gradient_angle_min);
    o.gradient_angle_max = b.value("gradient_angle_max", o.gradient_angle_max);
    o.texture_scale = b.value("texture_scale", o.texture_scale);
    o.texture_waves = b.value("texture_waves", o.texture_waves);
    o.pixel_noise = b.value("pixel_noise", o.pixel_noise);
  }
  s.placement_margin = j.value("placement_margin", d.placement_margin);
  s.train_per_class = j.value("train_per_class", d.train_per_class);
  s.test_per_class = j.value("test_per_class", d.test_per_class);
  s.ground_truth_mask = j.value("ground_truth_mask", d.ground_truth_mask);
  s.motifs_enabled = j.value("motifs_enabled", d.motifs_enabled);
  s.seed = j.value("seed", d.seed);
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synthetic spec '" + path.string() + "'");
  nlohmann::json j;
  in >> j;
  return j.get<SyntheticSpec>();
}

void rasterize_motif(const MotifSpec& motif, int cx, int cy, float intensity, Image& layer, Image& mask) {
  const double r = motif.radius;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double d2 = dx * dx + dy * dy;
      bool inside = false;
      float value = intensity;
      switch (motif.kind) {
        case MotifKind::none: break;
        case MotifKind::disk: inside = d2 <= r * r; break;
        case MotifKind::ring: {
          const double inner = std::max(0.0, r - motif.ring_width);
          inside = d2 <= r * r && d2 > inner * inner;
          break;
        }
        case MotifKind::stripes: {
          inside = std::fabs(dx) <= r && std::fabs(dy) <= r;
          const int band = static_cast<int>(std::floor((dx + r) / motif.stripe_period));
          if (band % 2 != 0) value = quantize(intensity * 0.3);
          break;
        }
      }
      if (!inside) continue;
      mask.at(y, x) = 1.0f;
      for (int c = 0; c < layer.channels; ++c) layer.at(y, x, c) = value;
    }
  }
}

RenderedSample render_sample(const SyntheticSpec& spec, int class_index, Rng& rng) {
  const int n = spec.image_size;
  const auto& bg = spec.background;
  RenderedSample out;
  out.background = Image(n, n, spec.channels);
  out.motif_layer = Image(n, n, spec.channels);
  out.mask = Image(n, n, 1);

  const double base = uniform(rng, bg.base_min, bg.base_max);
  const double angle = uniform(rng, bg.gradient_angle_min, bg.gradient_angle_max);
  const double ramp = uniform(rng, 0.0, bg.gradient_max);
  struct Wave {
    double amplitude, fx, fy, phase;
  };
  std::vector<Wave> waves;
  for (int k = 0; k < bg.texture_waves; ++k) {
    Wave w{bg.texture_scale * uniform(rng, 0.3, 1.0), static_cast<double>(uniform_index(rng, 7)) - 3.0,
           static_cast<double>(uniform_index(rng, 7)) - 3.0, uniform(rng, 0.0, 2.0 * std::numbers::pi)};
    waves.push_back(w);
  }
  const int span = n - 2 * spec.placement_margin;
  out.center_x = spec.placement_margin + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(span)));
  out.center_y = spec.placement_margin + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(span)));
  const MotifSpec& motif = spec.motifs.at(static_cast<std::size_t>(class_index));
  const float intensity = quantize(motif.intensity + motif.intensity_jitter * uniform(rng, -1.0, 1.0));

  const double mid = (n - 1) / 2.0;
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double v = base + ramp * ((x - mid) * ca + (y - mid) * sa) / n;
      for (const auto& w : waves) {
        v += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fx * x + w.fy * y) / n + w.phase);
      }
      for (int c = 0; c < spec.channels; ++c) {
        out.background.at(y, x, c) = quantize(v + bg.pixel_noise * standard_normal(rng));
      }
    }
  }

  if (spec.motifs_enabled) rasterize_motif(motif, out.center_x, out.center_y, intensity, out.motif_layer, out.mask);

  out.image = out.background;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (out.mask.at(y, x) == 0.0f) continue;
      for (int c = 0; c < spec.channels; ++c) out.image.at(y, x, c) = out.motif_layer.at(y, x, c);
    }
  }
  return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.manifest.image_size = spec.image_size;
  ds.manifest.channels = spec.channels;
  ds.manifest.source = DatasetSource::synthetic;
  ds.manifest.seed = spec.seed;
  for (int k = 0; k < spec.num_classes(); ++k) ds.manifest.classes.push_back({k, spec.class_names[k]});

  std::uint64_t stream = 0;
  for (Split split : {Split::train, Split::test}) {
    const int per_class = split == Split::train ? spec.train_per_class : spec.test_per_class;
    for (int k = 0; k < spec.num_classes(); ++k) {
      for (int i = 0; i < per_class; ++i) {
        Rng rng(derive_seed(spec.seed, stream++));
        RenderedSample r = render_sample(spec, k, rng);
        char id[128];
        std::snprintf(id, sizeof(id), "%s_%s_%05d", std::string(to_string(split)).c_str(),
                      spec.class_names[k].c_str(), i);
        ds.samples.push_back({id, std::move(r.image), ds.manifest.classes[k], split});
        if (spec.ground_truth_mask) ds.masks[id] = std::move(r.mask);
      }
      (split == Split::train ? ds.manifest.train_count : ds.manifest.test_count) += per_class;
    }
  }
  ds.report.loaded = ds.samples.size();
  return ds;
}

}  // namespace cae::data
