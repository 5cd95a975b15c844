#include "cae/data/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

#include <opencv2/imgproc.hpp>

#include "cae/data/image_io.hpp"

namespace cae::data {

namespace fs = std::filesystem;

std::string_view to_string(Split split) noexcept { return split == Split::train ? "train" : "test"; }

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  throw ConfigError("unknown split '" + std::string(text) + "'");
}

void DatasetManifest::validate() const {
  if (image_size <= 0) throw ConfigError("manifest: image_size must be positive");
  if (channels != 1 && channels != 3) throw ConfigError("manifest: channels must be 1 or 3");
  if (classes.empty()) throw ConfigError("manifest: no classes");
  std::set<int> indices;
  std::set<std::string> names;
  for (const auto& c : classes) {
    if (c.index < 0) throw ConfigError("manifest: negative class index");
    if (!indices.insert(c.index).second) throw ConfigError("manifest: duplicate class index");
    if (!names.insert(c.name).second) throw ConfigError("manifest: duplicate class name '" + c.name + "'");
  }
  if (*indices.rbegin() != static_cast<int>(classes.size()) - 1) {
    throw ConfigError("manifest: class indices must be 0..num_classes-1");
  }
}

const ClassLabel& DatasetManifest::class_by_name(std::string_view name) const {
  for (const auto& c : classes) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown class '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const DatasetManifest& m) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : m.classes) classes.push_back({{"index", c.index}, {"name", c.name}});
  j = {{"classes", classes},
       {"train_count", m.train_count},
       {"test_count", m.test_count},
       {"image_size", m.image_size},
       {"channels", m.channels},
       {"source", m.source == DatasetSource::folder ? "folder" : "synthetic"},
       {"seed", m.seed}};
}

void from_json(const nlohmann::json& j, DatasetManifest& m) {
  m.classes.clear();
  for (const auto& c : j.at("classes")) m.classes.push_back({c.at("index").get<int>(), c.at("name").get<std::string>()});
  m.train_count = j.value("train_count", std::size_t{0});
  m.test_count = j.value("test_count", std::size_t{0});
  m.image_size = j.value("image_size", 64);
  m.channels = j.value("channels", 1);
  m.source = j.value("source", std::string("folder")) == "synthetic" ? DatasetSource::synthetic : DatasetSource::folder;
  m.seed = j.value("seed", std::uint64_t{0});
}

std::vector<ImageSample> Dataset::split(Split which) const {
  std::vector<ImageSample> out;
  for (const auto& s : samples) {
    if (s.split == which) out.push_back(s);
  }
  return out;
}

const ImageSample& Dataset::by_id(std::string_view id) const {
  for (const auto& s : samples) {
    if (s.id == id) return s;
  }
  throw ContractError("unknown sample id '" + std::string(id) + "'");
}

const Image* Dataset::mask_for(std::string_view id) const {
  auto it = masks.find(std::string(id));
  return it == masks.end() ? nullptr : &it->second;
}

CropWindow center_crop_window(int width, int height) noexcept {
  const int side = std::min(width, height);
  return {(width - side) / 2, (height - side) / 2, side};
}

Image center_crop_square(const Image& image) {
  const CropWindow win = center_crop_window(image.width, image.height);
  Image out(win.side, win.side, image.channels);
  for (int y = 0; y < win.side; ++y) {
    std::copy_n(image.pixels.begin() + image.index(y + win.y, win.x), win.side * image.channels,
                out.pixels.begin() + out.index(y, 0));
  }
  return out;
}

Image resize_square(const Image& image, int size) {
  if (size <= 0) throw ContractError("resize_square: size must be positive");
  if (image.height == size && image.width == size) return image;
  cv::Mat src(image.height, image.width, CV_MAKETYPE(CV_32F, image.channels),
              const_cast<float*>(image.pixels.data()));
  cv::Mat dst;
  const bool shrinking = size < image.height || size < image.width;
  cv::resize(src, dst, cv::Size(size, size), 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  Image out(size, size, image.channels);
  for (int y = 0; y < size; ++y) {
    const float* row = dst.ptr<float>(y);
    std::copy(row, row + size * image.channels, out.pixels.begin() + out.index(y, 0));
  }
  for (float& v : out.pixels) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

Image preprocess(const Image& image, int size) { return resize_square(center_crop_square(image), size); }

namespace {

bool is_mask_file(const fs::path& p) {
  const std::string stem = p.stem().string();
  return stem.size() > 5 && stem.ends_with("_mask");
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

Dataset load_dataset(const fs::path& root, const DatasetManifest& manifest) {
  manifest.validate();
  if (!fs::is_directory(root)) throw ConfigError("dataset root '" + root.string() + "' is not a directory");

  Dataset out;
  out.manifest = manifest;
  out.manifest.train_count = 0;
  out.manifest.test_count = 0;

  bool any_split = false;
  std::set<std::string> seen_ids;
  for (Split split : {Split::train, Split::test}) {
    const fs::path split_dir = root / std::string(to_string(split));
    if (!fs::is_directory(split_dir)) continue;
    any_split = true;
    for (const auto& label : manifest.classes) {
      const fs::path class_dir = split_dir / label.name;
      if (!fs::is_directory(class_dir)) {
        throw ConfigError("missing class directory '" + class_dir.string() + "'");
      }
      std::size_t class_count = 0;
      for (const auto& file : sorted_files(class_dir)) {
        const bool mask = is_mask_file(file);
        auto decoded = read_image(file, mask ? 1 : manifest.channels);
        if (!decoded) {
          out.report.skipped += 1;
          out.report.warnings.push_back("undecodable file skipped: " + file.string());
          std::clog << "[warn] undecodable file skipped: " << file.string() << "\n";
          continue;
        }
        Image pixels = preprocess(*decoded, manifest.image_size);
        if (mask) {
          std::string id = file.stem().string();
          id.resize(id.size() - 5);
          for (float& v : pixels.pixels) v = v >= 0.5f ? 1.0f : 0.0f;
          out.masks[id] = std::move(pixels);
          continue;
        }
        ImageSample sample{file.stem().string(), std::move(pixels), label, split};
        if (!seen_ids.insert(sample.id).second) {
          throw ConfigError("duplicate sample id '" + sample.id + "' across the dataset");
        }
        out.samples.push_back(std::move(sample));
        out.report.loaded += 1;
        ++class_count;
      }
      if (class_count == 0) throw ConfigError("class directory '" + class_dir.string() + "' has no images");
      (split == Split::train ? out.manifest.train_count : out.manifest.test_count) += class_count;
    }
  }
  if (!any_split) throw ConfigError("dataset root '" + root.string() + "' has neither train/ nor test/");
  return out;
}

Dataset load_dataset(const fs::path& root) {
  std::ifstream in(root / "manifest.json");
  if (!in) throw ConfigError("missing manifest.json under '" + root.string() + "'");
  nlohmann::json j;
  in >> j;
  DatasetManifest manifest = j.at("manifest").get<DatasetManifest>();
  Dataset ds = load_dataset(root, manifest);
  ds.manifest.source = manifest.source;
  ds.manifest.seed = manifest.seed;
  return ds;
}

void save_dataset(const Dataset& dataset, const fs::path& root, const nlohmann::json& extra) {
  fs::create_directories(root);
  for (const auto& s : dataset.samples) {
    const fs::path dir = root / std::string(to_string(s.split)) / s.label.name;
    write_png(dir / (s.id + ".png"), s.pixels);
    if (const Image* mask = dataset.mask_for(s.id)) write_png(dir / (s.id + "_mask.png"), *mask);
  }
  nlohmann::json j = extra.is_object() ? extra : nlohmann::json::object();
  j["manifest"] = dataset.manifest;
  std::ofstream(root / "manifest.json") << j.dump(2) << "\n";
}

Image flip_horizontal(const Image& image) {
  Image out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) out.at(y, x, c) = image.at(y, image.width - 1 - x, c);
    }
  }
  return out;
}

ImageSample augment(const ImageSample& sample, double flip_probability, Rng& rng) {
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw ContractError("augment: flip_probability must lie in [0,1]");
  }
  ImageSample out = sample;
  if (uniform01(rng) < flip_probability) out.pixels = flip_horizontal(sample.pixels);
  return out;
}

}  // namespace cae::data
