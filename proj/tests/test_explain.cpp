#include <gtest/gtest.h>

#include "cae/explain/explainer.hpp"
#include "cae/explain/saliency.hpp"
#include "cae/explain/series.hpp"
#include "cae/manifold/index.hpp"
#include "support.hpp"

using namespace cae;
using namespace cae::explain;
using nets::ClassCode;

namespace {

Image pixel_image(float v) {
  Image x(1, 1, 1);
  x.pixels = {v};
  return x;
}

CounterfactualSeries series_of(std::vector<Image> frames, std::vector<double> p_target) {
  CounterfactualSeries s;
  s.frames = std::move(frames);
  for (double p : p_target) s.probs.push_back({1.0 - p, p});
  s.target_class = 1;
  return s;
}

// Window model on 8x8 images; the classifier reads the window mean.
struct Fixture {
  test::WindowCodeModel model{8, 2, 3, 3};
  test::ScoreClassifier clf{test::window_mean(2, 3, 3), 12.0, 0.5};

  Image image(float window, Rng& rng) const {
    Image x = test::random_image(8, 8, 1, rng);
    for (int y = 2; y < 5; ++y)
      for (int c = 3; c < 6; ++c) x.at(y, c) = window;
    return x;
  }

  manifold::ManifoldIndex index(Rng& rng) const {
    std::vector<manifold::ManifoldEntry> es;
    for (int i = 0; i < 6; ++i) {
      const int label = i % 2;
      const auto code = model.encode(image(label ? 0.9f : 0.1f, rng)).class_code;
      es.push_back({"s" + std::to_string(i), {label, label ? "bright" : "dark"}, code, data::Split::test});
    }
    return manifold::ManifoldIndex(es);
  }
};

}  // namespace

TEST(DifferentialMaps, HandValueAndLength) {
  const auto maps = differential_maps(series_of({pixel_image(0.2f), pixel_image(0.6f)}, {0.1, 0.2}));
  ASSERT_EQ(maps.size(), 1u);
  EXPECT_NEAR(maps[0].values[0], 0.4f, 1e-6);
  Rng rng(1);
  const Image a = test::random_image(4, 4, 3, rng);
  const auto constant = differential_maps(series_of({a, a, a, a}, {0, 0, 0, 0}));
  EXPECT_EQ(constant.size(), 3u);
  for (const auto& m : constant)
    for (float v : m.values) EXPECT_EQ(v, 0.0f);
  EXPECT_THROW(differential_maps(series_of({a}, {0})), ContractError);
}

TEST(DifferentialMaps, ChannelSummed) {
  Image a(1, 1, 3), b(1, 1, 3);
  a.pixels = {0.1f, 0.5f, 0.9f};
  b.pixels = {0.2f, 0.3f, 0.9f};
  EXPECT_NEAR(differential_maps(series_of({a, b}, {0, 0}))[0].values[0], 0.3f, 1e-6);
}

TEST(WeightedSaliency, SingleStepOnePixel) {
  Image a(2, 2, 1, 0.3f), b = a;
  b.at(1, 0) = 0.7f;
  const SaliencyMap m = saliency_weighted_series(series_of({a, b}, {0.2, 0.7}));
  EXPECT_EQ(m.mode, SaliencyMode::weighted_series);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) EXPECT_NEAR(m.at(y, x), (y == 1 && x == 0) ? 0.4f : 0.0f, 1e-6);
}

TEST(WeightedSaliency, TwoStepNormalisation) {
  Image f0(1, 2, 1), f1(1, 2, 1), f2(1, 2, 1);
  f0.pixels = {0.0f, 0.0f};
  f1.pixels = {1.0f, 0.0f};  // m1 = [1, 0]
  f2.pixels = {1.0f, 1.0f};  // m2 = [0, 1]
  const auto s = series_of({f0, f1, f2}, {0.1, 0.3, 0.9});
  const auto w = series_weights(s);
  EXPECT_NEAR(w[0], 0.25, 1e-12);
  EXPECT_NEAR(w[1], 0.75, 1e-12);
  const SaliencyMap m = saliency_weighted_series(s);
  EXPECT_NEAR(m.values[0], 0.25f, 1e-6);
  EXPECT_NEAR(m.values[1], 0.75f, 1e-6);
}

TEST(WeightedSaliency, NegativeGainsClampAndUniformFallback) {
  Image f0(1, 1, 1), f1(1, 1, 1), f2(1, 1, 1);
  const auto clamped = series_weights(series_of({f0, f1, f2}, {0.5, 0.2, 0.6}));
  EXPECT_EQ(clamped[0], 0.0);
  EXPECT_EQ(clamped[1], 1.0);
  const auto uniform = series_weights(series_of({f0, f1, f2}, {0.5, 0.4, 0.3}));
  EXPECT_EQ(uniform[0], 0.5);
  EXPECT_EQ(uniform[1], 0.5);
}

TEST(EndpointSaliency, HandValueAndInteriorInvariance) {
  const auto a = saliency_endpoint_contrast(series_of({pixel_image(0.1f), pixel_image(0.5f), pixel_image(0.9f)}, {0, 0, 0}));
  EXPECT_NEAR(a.values[0], 0.8f, 1e-6);
  const auto b = saliency_endpoint_contrast(series_of({pixel_image(0.1f), pixel_image(0.0f), pixel_image(0.9f)}, {0, 0, 0}));
  EXPECT_EQ(a.values, b.values);
  const auto zero = saliency_endpoint_contrast(series_of({pixel_image(0.3f), pixel_image(0.7f), pixel_image(0.3f)}, {0, 0, 0}));
  EXPECT_EQ(zero.values[0], 0.0f);
  EXPECT_EQ(a.mode, SaliencyMode::endpoint_contrast);
}

TEST(SaliencyMap, Max1NormalisationAndMass) {
  SaliencyMap m(2, 2, SaliencyMode::weighted_series);
  m.values = {1.0f, 3.0f, 0.0f, 4.0f};
  const SaliencyMap n = normalized_max1(m);
  EXPECT_EQ(n.normalization, Normalization::max1);
  EXPECT_FLOAT_EQ(n.values[3], 1.0f);
  EXPECT_FLOAT_EQ(n.values[1], 0.75f);
  Image mask(2, 2, 1, 0.0f);
  mask.at(1, 1) = 1.0f;
  EXPECT_NEAR(m.mass_fraction_inside(mask), 0.5, 1e-12);
  const SaliencyMap zero(2, 2, SaliencyMode::weighted_series);
  EXPECT_EQ(normalized_max1(zero).values, zero.values);
  EXPECT_EQ(zero.mass_fraction_inside(mask), 0.0);
  EXPECT_THROW(parse_mode("gradcam"), ContractError);
  EXPECT_EQ(parse_mode("endpoint"), SaliencyMode::endpoint_contrast);
  EXPECT_EQ(parse_mode("weighted"), SaliencyMode::weighted_series);
}

TEST(GenerateAlongPath, FramesFollowPathWithFixedIndividual) {
  Fixture f;
  Rng rng(3);
  const Image x = f.image(0.1f, rng);
  const auto enc = f.model.encode(x);
  const auto path = manifold::linear_path(enc.class_code, ClassCode{{0.9f}}, 4, manifold::EndMode::custom_point);
  const auto s = generate_along_path(x, path, 1, f.model, f.clf);
  ASSERT_EQ(s.frames.size(), 5u);
  ASSERT_EQ(s.probs.size(), 5u);
  EXPECT_EQ(s.frames[0], f.model.decode(enc.class_code, enc.individual));
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    EXPECT_EQ(s.frames[i], f.model.decode(path.codes[i], enc.individual));
    // Re-encoding leaves the individual code untouched.
    EXPECT_EQ(f.model.encode(s.frames[i]).individual, enc.individual);
    double sum = 0.0;
    for (double p : s.probs[i]) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  EXPECT_GT(s.target_probability(4), s.target_probability(0));
  ASSERT_TRUE(s.stop_index.has_value());
}

TEST(GenerateAlongPath, StopsAtZeroWhenAlreadyTarget) {
  Fixture f;
  Rng rng(3);
  const Image x = f.image(0.9f, rng);
  const auto enc = f.model.encode(x);
  const auto path = manifold::linear_path(enc.class_code, ClassCode{{1.0f}}, 5, manifold::EndMode::custom_point);
  GenerationOptions opts;
  opts.stop_early = true;
  const auto s = generate_along_path(x, path, 1, f.model, f.clf, opts);
  ASSERT_TRUE(s.stop_index.has_value());
  EXPECT_EQ(*s.stop_index, 0);
  EXPECT_EQ(s.frames.size(), 1u);
}

TEST(GenerateAlongPath, SingleStepPath) {
  Fixture f;
  Rng rng(4);
  const Image x = f.image(0.2f, rng);
  const auto enc = f.model.encode(x);
  const auto path = manifold::linear_path(enc.class_code, ClassCode{{0.8f}}, 1, manifold::EndMode::custom_point);
  const auto s = generate_along_path(x, path, 1, f.model, f.clf);
  ASSERT_EQ(s.frames.size(), 2u);
  EXPECT_EQ(s.frames[1], f.model.decode(ClassCode{{0.8f}}, enc.individual));
}

TEST(GenerateAlongPath, MismatchedStartThrows) {
  Fixture f;
  Rng rng(4);
  const Image x = f.image(0.2f, rng);
  const auto path = manifold::linear_path(ClassCode{{0.6f}}, ClassCode{{0.8f}}, 2, manifold::EndMode::custom_point);
  EXPECT_THROW(generate_along_path(x, path, 1, f.model, f.clf), ContractError);
}

TEST(GenerateAlongPath, RecomputeModeMatchesFixedForExactModel) {
  Fixture f;
  Rng rng(5);
  const Image x = f.image(0.15f, rng);
  const auto enc = f.model.encode(x);
  const auto path = manifold::linear_path(enc.class_code, ClassCode{{0.85f}}, 3, manifold::EndMode::custom_point);
  GenerationOptions opts;
  opts.recompute_individual = true;
  const auto a = generate_along_path(x, path, 1, f.model, f.clf, opts);
  const auto b = generate_along_path(x, path, 1, f.model, f.clf);
  EXPECT_EQ(a.frames, b.frames);
}

TEST(Explainer, SaliencyLandsInsideWindowAndIsDeterministic) {
  Fixture f;
  Rng rng(6);
  const auto index = f.index(rng);
  const Explainer ex(&f.model, &f.clf, &index);
  const auto sample = test::make_sample("q", f.image(0.1f, rng), 0, "dark");
  ExplainConfig cfg;
  const Explanation a = ex.explain_sample(sample, {1, "bright"}, cfg);
  const Explanation b = ex.explain_sample(sample, {1, "bright"}, cfg);
  EXPECT_EQ(a.saliency.values, b.saliency.values);
  EXPECT_EQ(a.series.frames.size(), 11u);
  EXPECT_NEAR(a.saliency.mass_fraction_inside(f.model.window_mask()), 1.0, 1e-9);
  for (float v : a.saliency.values) EXPECT_GE(v, 0.0f);
  cfg.mode = SaliencyMode::endpoint_contrast;
  const Explanation e = ex.explain_sample(sample, {1, "bright"}, cfg);
  EXPECT_EQ(e.saliency.mode, SaliencyMode::endpoint_contrast);
  EXPECT_NEAR(e.saliency.mass_fraction_inside(f.model.window_mask()), 1.0, 1e-9);
}

TEST(Explainer, NullPathGivesZeroMapInBothModes) {
  Fixture f;
  Rng rng(7);
  const auto index = f.index(rng);
  const Explainer ex(&f.model, &f.clf, &index);
  const Image x = f.image(0.4f, rng);
  const ClassCode own = f.model.encode(x).class_code;
  for (auto mode : {SaliencyMode::weighted_series, SaliencyMode::endpoint_contrast}) {
    ExplainConfig cfg;
    cfg.mode = mode;
    const auto e = ex.explain(x, manifold::PointTarget{own}, cfg);
    for (float v : e.saliency.values) EXPECT_EQ(v, 0.0f);
  }
}

TEST(Explainer, TargetsAndCounterClasses) {
  Fixture f;
  Rng rng(8);
  const auto index = f.index(rng);
  const Explainer ex(&f.model, &f.clf, &index);
  EXPECT_EQ(ex.resolve_target_class(manifold::SampleTarget{"s1"}), 1);
  EXPECT_EQ(ex.resolve_target_class(manifold::ClassTarget{0}), 0);
  EXPECT_EQ(ex.resolve_target_class(manifold::PointTarget{ClassCode{{0.88f}}}), 1);
  const auto sample = test::make_sample("q", f.image(0.1f, rng), 0, "dark");
  const auto all = ex.explain_counter_classes(sample, ExplainConfig{});
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].series.target_class, 1);
}

TEST(Explainer, UnreadyStateThrows) {
  Fixture f;
  const manifold::ManifoldIndex empty;
  const Explainer no_index(&f.model, &f.clf, &empty);
  const Explainer no_model(nullptr, &f.clf, &empty);
  Rng rng(1);
  const auto sample = test::make_sample("q", f.image(0.1f, rng), 0);
  EXPECT_THROW(no_index.explain_sample(sample, {1, "b"}, ExplainConfig{}), StateError);
  EXPECT_THROW(no_model.explain_sample(sample, {1, "b"}, ExplainConfig{}), StateError);
}
