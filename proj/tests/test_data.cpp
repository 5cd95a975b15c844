#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "cae/data/dataset.hpp"
#include "cae/data/image_io.hpp"
#include "cae/data/synthetic.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace cae;
using namespace cae::data;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cae_test_data_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

DatasetManifest two_class_manifest(int size) {
  DatasetManifest m;
  m.classes = {{0, "cat"}, {1, "dog"}};
  m.image_size = size;
  m.channels = 1;
  return m;
}

void write_gray(const fs::path& path, int h, int w, float v) {
  fs::create_directories(path.parent_path());
  write_png(path, Image(h, w, 1, v));
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.train_per_class = 6;
  spec.test_per_class = 3;
  spec.seed = 42;
  return spec;
}

}  // namespace

TEST(CenterCrop, WiderImageCropsHorizontally) {
  const CropWindow w = center_crop_window(100, 80);
  EXPECT_EQ(w.x, 10);
  EXPECT_EQ(w.y, 0);
  EXPECT_EQ(w.side, 80);
}

TEST(CenterCrop, TallerImageCropsVertically) {
  const CropWindow w = center_crop_window(30, 50);
  EXPECT_EQ(w.x, 0);
  EXPECT_EQ(w.y, 10);
  EXPECT_EQ(w.side, 30);
}

TEST(Preprocess, CropsThenResizes) {
  Image img(80, 100, 1, 0.0f);
  // Columns 10..89 survive the crop; mark them so the crop offset is observable.
  for (int y = 0; y < 80; ++y)
    for (int x = 10; x < 90; ++x) img.at(y, x) = 1.0f;
  const Image cropped = center_crop_square(img);
  ASSERT_EQ(cropped.width, 80);
  ASSERT_EQ(cropped.height, 80);
  for (float v : cropped.pixels) EXPECT_EQ(v, 1.0f);
  const Image out = preprocess(img, 64);
  EXPECT_EQ(out.width, 64);
  EXPECT_EQ(out.height, 64);
  for (float v : out.pixels) EXPECT_NEAR(v, 1.0f, 1e-6);
}

TEST(LoadDataset, CountsAndShapes) {
  const fs::path root = scratch_dir("counts");
  for (const char* cls : {"cat", "dog"})
    for (int i = 0; i < 3; ++i) write_gray(root / "train" / cls / (std::string(cls) + std::to_string(i) + ".png"), 40, 50, 0.5f);
  const Dataset ds = load_dataset(root, two_class_manifest(64));
  ASSERT_EQ(ds.samples.size(), 6u);
  for (const auto& s : ds.samples) {
    EXPECT_EQ(s.pixels.height, 64);
    EXPECT_EQ(s.pixels.width, 64);
    EXPECT_EQ(s.split, Split::train);
    EXPECT_TRUE(all_within_unit_range(s.pixels));
  }
  EXPECT_EQ(ds.manifest.train_count, 6u);
  EXPECT_EQ(ds.manifest.test_count, 0u);
}

TEST(LoadDataset, SplitComesFromDirectories) {
  const fs::path root = scratch_dir("splits");
  write_gray(root / "train" / "cat" / "a.png", 8, 8, 0.2f);
  write_gray(root / "train" / "dog" / "b.png", 8, 8, 0.2f);
  write_gray(root / "test" / "cat" / "c.png", 8, 8, 0.2f);
  write_gray(root / "test" / "dog" / "d.png", 8, 8, 0.2f);
  const Dataset ds = load_dataset(root, two_class_manifest(8));
  EXPECT_EQ(ds.split(Split::train).size(), 2u);
  EXPECT_EQ(ds.split(Split::test).size(), 2u);
  std::set<std::string> train_ids, test_ids;
  for (const auto& s : ds.split(Split::train)) train_ids.insert(s.id);
  for (const auto& s : ds.split(Split::test)) EXPECT_FALSE(train_ids.count(s.id));
}

TEST(LoadDataset, EmptyClassDirectoryIsConfigError) {
  const fs::path root = scratch_dir("empty");
  write_gray(root / "train" / "cat" / "a.png", 8, 8, 0.2f);
  fs::create_directories(root / "train" / "dog");
  EXPECT_THROW(load_dataset(root, two_class_manifest(8)), ConfigError);
}

TEST(LoadDataset, MissingClassDirectoryIsConfigError) {
  const fs::path root = scratch_dir("missing");
  write_gray(root / "train" / "cat" / "a.png", 8, 8, 0.2f);
  EXPECT_THROW(load_dataset(root, two_class_manifest(8)), ConfigError);
}

TEST(LoadDataset, UndecodableFileIsSkippedAndCounted) {
  const fs::path root = scratch_dir("skip");
  write_gray(root / "train" / "cat" / "a.png", 8, 8, 0.2f);
  write_gray(root / "train" / "dog" / "b.png", 8, 8, 0.2f);
  std::ofstream(root / "train" / "dog" / "broken.png") << "not an image";
  const Dataset ds = load_dataset(root, two_class_manifest(8));
  EXPECT_EQ(ds.samples.size(), 2u);
  EXPECT_EQ(ds.report.skipped, 1u);
  EXPECT_FALSE(ds.report.warnings.empty());
}

TEST(Augment, ZeroProbabilityKeepsPixels) {
  Rng rng(1);
  const auto s = test::make_sample("a", test::random_image(5, 5, 1, rng), 0);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(augment(s, 0.0, rng).pixels, s.pixels);
}

TEST(Augment, CertainFlipReversesColumns) {
  Image img(2, 2, 1);
  img.pixels = {1, 2, 3, 4};  // [[a,b],[c,d]]
  Rng rng(3);
  const auto out = augment(test::make_sample("a", img, 1), 1.0, rng);
  EXPECT_EQ(out.pixels.pixels, (std::vector<float>{2, 1, 4, 3}));
  EXPECT_EQ(out.id, "a");
  EXPECT_EQ(out.label.index, 1);
}

TEST(Augment, DoubleFlipIsIdentity) {
  Rng rng(5);
  const auto s = test::make_sample("a", test::random_image(7, 6, 3, rng), 0);
  EXPECT_EQ(augment(augment(s, 1.0, rng), 1.0, rng).pixels, s.pixels);
}

TEST(Augment, ProbabilityOutOfRangeThrows) {
  Rng rng(5);
  const auto s = test::make_sample("a", Image(2, 2, 1), 0);
  EXPECT_THROW(augment(s, 1.5, rng), ContractError);
  EXPECT_THROW(augment(s, -0.1, rng), ContractError);
}

TEST(Synthetic, SameSeedGivesIdenticalDatasets) {
  const Dataset a = generate_synthetic(small_spec());
  const Dataset b = generate_synthetic(small_spec());
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].id, b.samples[i].id);
    EXPECT_EQ(a.samples[i].pixels, b.samples[i].pixels);
  }
  EXPECT_EQ(a.masks, b.masks);
}

TEST(Synthetic, DifferentSeedChangesPixels) {
  SyntheticSpec other = small_spec();
  other.seed = 43;
  EXPECT_NE(generate_synthetic(small_spec()).samples[0].pixels, generate_synthetic(other).samples[0].pixels);
}

TEST(Synthetic, DiskMaskAreaWithinDiscretizationBounds) {
  SyntheticSpec spec = small_spec();
  spec.motifs = {MotifSpec{MotifKind::none}, MotifSpec{MotifKind::disk, 5.0, 0.9}};
  spec.class_names = {"absent", "disk"};
  spec.train_per_class = 40;
  const Dataset ds = generate_synthetic(spec);
  const double lo = std::numbers::pi * 16.0, hi = std::numbers::pi * 36.0;
  int checked = 0;
  for (const auto& s : ds.samples) {
    const Image* mask = ds.mask_for(s.id);
    ASSERT_NE(mask, nullptr);
    double area = 0.0;
    for (float v : mask->pixels) area += v > 0.5f ? 1.0 : 0.0;
    if (s.label.index == 1) {
      EXPECT_GE(area, lo);
      EXPECT_LE(area, hi);
      ++checked;
    } else {
      EXPECT_EQ(area, 0.0);
    }
  }
  EXPECT_EQ(checked, 43);
}

TEST(Synthetic, PixelsInUnitRangeAndIdsDisjoint) {
  const Dataset ds = generate_synthetic(small_spec());
  std::set<std::string> ids;
  for (const auto& s : ds.samples) {
    EXPECT_TRUE(all_within_unit_range(s.pixels));
    EXPECT_TRUE(ids.insert(s.id).second);
  }
  EXPECT_EQ(ds.manifest.train_count, 12u);
  EXPECT_EQ(ds.manifest.test_count, 6u);
}

TEST(Synthetic, MaskMatchesRenderedMotif) {
  SyntheticSpec spec = small_spec();
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const RenderedSample r = render_sample(spec, k % 2, rng);
    for (std::size_t i = 0; i < r.mask.pixels.size(); ++i) {
      const bool inside = r.mask.pixels[i] > 0.5f;
      if (!inside) {
        // Outside the mask the image is the background alone.
        EXPECT_EQ(r.motif_layer.pixels[i], 0.0f);
      }
    }
    // Zeroing outside the mask keeps the motif; zeroing inside removes it.
    Image kept = r.image, removed = r.image;
    double mass_kept = 0.0, mass_removed = 0.0;
    for (std::size_t i = 0; i < r.mask.pixels.size(); ++i) {
      if (r.mask.pixels[i] > 0.5f) {
        removed.pixels[i] = 0.0f;
        mass_kept += std::abs(kept.pixels[i] - r.background.pixels[i]);
      } else {
        kept.pixels[i] = 0.0f;
        mass_removed += std::abs(removed.pixels[i] - r.background.pixels[i]);
      }
    }
    EXPECT_GT(mass_kept, 0.0);
    EXPECT_EQ(mass_removed, 0.0);
  }
}

TEST(Synthetic, IdenticalMotifsRejected) {
  SyntheticSpec spec = small_spec();
  spec.motifs[1] = spec.motifs[0];
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Synthetic, SpecJsonRoundTrip) {
  SyntheticSpec spec = small_spec();
  spec.motifs[0] = MotifSpec{MotifKind::stripes, 5.0, 0.7, 0.0, 2.0, 4.0};
  const nlohmann::json j = spec;
  const SyntheticSpec back = j.get<SyntheticSpec>();
  EXPECT_EQ(back.motifs, spec.motifs);
  EXPECT_EQ(back.seed, spec.seed);
  EXPECT_EQ(back.class_names, spec.class_names);
}

TEST(Synthetic, SaveAndReloadIsExact) {
  const Dataset ds = generate_synthetic(small_spec());
  const fs::path root = scratch_dir("roundtrip");
  save_dataset(ds, root);
  const Dataset back = load_dataset(root);
  ASSERT_EQ(back.samples.size(), ds.samples.size());
  for (const auto& s : ds.samples) {
    const auto& r = back.by_id(s.id);
    EXPECT_EQ(r.pixels, s.pixels) << s.id;
    EXPECT_EQ(r.label, s.label);
    EXPECT_EQ(r.split, s.split);
    ASSERT_NE(back.mask_for(s.id), nullptr);
    EXPECT_EQ(*back.mask_for(s.id), *ds.mask_for(s.id));
  }
}

TEST(ImageIo, SixteenBitRoundTripIsClose) {
  Rng rng(2);
  const Image img = test::random_image(9, 11, 3, rng);
  const auto decoded = decode_png(encode_png(img, 16), 3);
  ASSERT_TRUE(decoded.has_value());
  ASSERT_TRUE(decoded->same_shape(img));
  for (std::size_t i = 0; i < img.pixels.size(); ++i) EXPECT_NEAR(decoded->pixels[i], img.pixels[i], 1.0 / 65535.0);
}

TEST(ImageIo, UndecodableBytesGiveNullopt) {
  EXPECT_FALSE(decode_png({1, 2, 3, 4}, 1).has_value());
}

TEST(LoadDataset, IdsAreFileStemsAndMustBeUnique) {
  const fs::path root = scratch_dir("dupes");
  write_gray(root / "train" / "cat" / "same.png", 8, 8, 0.2f);
  write_gray(root / "train" / "dog" / "same.png", 8, 8, 0.2f);
  EXPECT_THROW(load_dataset(root, two_class_manifest(8)), ConfigError);
}
