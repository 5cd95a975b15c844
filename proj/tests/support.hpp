#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cae/common/image.hpp"
#include "cae/common/random.hpp"
#include "cae/data/dataset.hpp"
#include "cae/nets/blackbox.hpp"
#include "cae/nets/codes.hpp"

namespace cae::test {

inline Image random_image(int h, int w, int c, Rng& rng) {
  Image img(h, w, c);
  for (auto& v : img.pixels) v = static_cast<float>(uniform01(rng));
  return img;
}

inline data::ImageSample make_sample(std::string id, Image pixels, int label, std::string name = "",
                                     data::Split split = data::Split::test) {
  data::ImageSample s;
  s.id = std::move(id);
  s.pixels = std::move(pixels);
  s.label = {label, name.empty() ? "class" + std::to_string(label) : std::move(name)};
  s.split = split;
  return s;
}

/// Two-class classifier with p(class 1) = sigmoid(scale * (score(x) - offset)).
class ScoreClassifier final : public nets::BlackBoxClassifier {
 public:
  ScoreClassifier(std::function<double(const Image&)> score, double scale = 1.0, double offset = 0.0)
      : score_(std::move(score)), scale_(scale), offset_(offset) {}

  int num_classes() const override { return 2; }
  std::vector<nets::Probabilities> classify(std::span<const Image> batch) const override {
    std::vector<nets::Probabilities> out;
    for (const auto& x : batch) {
      const double p1 = 1.0 / (1.0 + std::exp(-scale_ * (score_(x) - offset_)));
      out.push_back({1.0 - p1, p1});
    }
    return out;
  }
  using nets::BlackBoxClassifier::classify;

 private:
  std::function<double(const Image&)> score_;
  double scale_;
  double offset_;
};

/// logit_1 = w * x[row, col, 0], logit_0 = 0.
class OnePixelLinearClassifier final : public nets::BlackBoxClassifier {
 public:
  OnePixelLinearClassifier(int row, int col, double w) : row_(row), col_(col), w_(w) {}
  int num_classes() const override { return 2; }
  std::vector<nets::Probabilities> classify(std::span<const Image> batch) const override {
    std::vector<nets::Probabilities> out;
    for (const auto& x : batch) {
      const double p1 = 1.0 / (1.0 + std::exp(-w_ * x.at(row_, col_)));
      out.push_back({1.0 - p1, p1});
    }
    return out;
  }
  using nets::BlackBoxClassifier::classify;
  bool differentiable() const override { return true; }
  Image logit_gradient(const Image& x, int class_index) const override {
    Image g(x.height, x.width, x.channels, 0.0f);
    if (class_index == 1) g.at(row_, col_) = static_cast<float>(w_);
    return g;
  }

 private:
  int row_, col_;
  double w_;
};

/// Code model over h x w single-channel images: the class code is the mean
/// intensity inside a fixed window (d_c = 1); the individual code is the
/// image itself with the window zeroed. Decoding writes the code back into the
/// window, so encode and decode are mutually inverse on images whose window is flat.
class WindowCodeModel final : public nets::CodeModel {
 public:
  WindowCodeModel(int size, int y0, int x0, int side) : size_(size), y0_(y0), x0_(x0), side_(side) {}

  int class_code_dim() const override { return 1; }
  std::vector<nets::EncodedImage> encode(std::span<const Image> batch) const override {
    std::vector<nets::EncodedImage> out;
    for (const auto& x : batch) {
      double sum = 0.0;
      nets::IndividualCode s{1, size_, size_, x.pixels};
      for (int y = y0_; y < y0_ + side_; ++y)
        for (int c = x0_; c < x0_ + side_; ++c) {
          sum += x.at(y, c);
          s.values[static_cast<std::size_t>(y) * size_ + c] = 0.0f;
        }
      out.push_back({nets::ClassCode{{static_cast<float>(sum / (side_ * side_))}}, std::move(s)});
    }
    return out;
  }
  std::vector<Image> decode(std::span<const nets::ClassCode> cs, std::span<const nets::IndividualCode> ss) const override {
    std::vector<Image> out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      Image x(size_, size_, 1);
      x.pixels = ss[i].values;
      const float v = std::clamp(cs[i].values[0], 0.0f, 1.0f);
      for (int y = y0_; y < y0_ + side_; ++y)
        for (int c = x0_; c < x0_ + side_; ++c) x.at(y, c) = v;
      out.push_back(std::move(x));
    }
    return out;
  }
  using nets::CodeModel::decode;
  using nets::CodeModel::encode;

  Image window_mask() const {
    Image m(size_, size_, 1, 0.0f);
    for (int y = y0_; y < y0_ + side_; ++y)
      for (int c = x0_; c < x0_ + side_; ++c) m.at(y, c) = 1.0f;
    return m;
  }

 private:
  int size_, y0_, x0_, side_;
};

// Mean intensity inside the window used by WindowCodeModel.
inline std::function<double(const Image&)> window_mean(int y0, int x0, int side) {
  return [=](const Image& x) {
    double sum = 0.0;
    for (int y = y0; y < y0 + side; ++y)
      for (int c = x0; c < x0 + side; ++c) sum += x.at(y, c);
    return sum / (side * side);
  };
}

}  // namespace cae::test
