#include "cae/data/image_io.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace cae::data {

namespace {

std::optional<Image> from_mat(const cv::Mat& raw, int channels) {
  if (raw.empty()) return std::nullopt;
  cv::Mat mat = raw;
  float max_value = 1.0f;
  switch (mat.depth()) {
    case CV_8U: max_value = 255.0f; break;
    case CV_16U: max_value = 65535.0f; break;
    case CV_32F: break;
    default: return std::nullopt;
  }
  cv::Mat converted;
  if (mat.channels() == 4) {
    cv::cvtColor(mat, converted, cv::COLOR_BGRA2BGR);
    mat = converted;
  }
  if (channels == 1 && mat.channels() == 3) {
    cv::cvtColor(mat, converted, cv::COLOR_BGR2GRAY);
    mat = converted;
  } else if (channels == 3 && mat.channels() == 1) {
    cv::cvtColor(mat, converted, cv::COLOR_GRAY2RGB);
    mat = converted;
  } else if (channels == 3 && mat.channels() == 3) {
    cv::cvtColor(mat, converted, cv::COLOR_BGR2RGB);
    mat = converted;
  }
  if (mat.channels() != channels) return std::nullopt;
  cv::Mat as_float;
  mat.convertTo(as_float, CV_32F);
  Image out(as_float.rows, as_float.cols, channels);
  for (int y = 0; y < as_float.rows; ++y) {
    const float* row = as_float.ptr<float>(y);
    std::copy(row, row + as_float.cols * channels, out.pixels.begin() + out.index(y, 0));
  }
  // Divide rather than multiply by the reciprocal so k / 255 round-trips exactly.
  for (float& v : out.pixels) v = std::clamp(v / max_value, 0.0f, 1.0f);
  return out;
}

cv::Mat to_mat(const Image& image, int bit_depth) {
  if (image.channels != 1 && image.channels != 3) {
    throw ContractError("encode_png: only 1 or 3 channel images are supported");
  }
  if (bit_depth != 8 && bit_depth != 16) throw ContractError("encode_png: bit_depth must be 8 or 16");
  const double max_value = bit_depth == 8 ? 255.0 : 65535.0;
  cv::Mat mat(image.height, image.width, CV_MAKETYPE(bit_depth == 8 ? CV_8U : CV_16U, image.channels));
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        // RGB -> BGR for OpenCV.
        const int src_c = image.channels == 3 ? 2 - c : c;
        const double v = std::clamp(static_cast<double>(image.at(y, x, src_c)), 0.0, 1.0);
        const auto q = static_cast<unsigned>(std::lround(v * max_value));
        if (bit_depth == 8) {
          mat.ptr<unsigned char>(y)[x * image.channels + c] = static_cast<unsigned char>(q);
        } else {
          mat.ptr<unsigned short>(y)[x * image.channels + c] = static_cast<unsigned short>(q);
        }
      }
    }
  }
  return mat;
}

}  // namespace

std::optional<Image> read_image(const std::filesystem::path& path, int channels) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  return from_mat(raw, channels);
}

std::vector<unsigned char> encode_png(const Image& image, int bit_depth) {
  std::vector<unsigned char> bytes;
  // Fixed compression level keeps the byte stream reproducible.
  cv::imencode(".png", to_mat(image, bit_depth), bytes, {cv::IMWRITE_PNG_COMPRESSION, 6});
  return bytes;
}

std::optional<Image> decode_png(const std::vector<unsigned char>& bytes, int channels) {
  cv::Mat raw = cv::imdecode(bytes, cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  return from_mat(raw, channels);
}

void write_png(const std::filesystem::path& path, const Image& image, int bit_depth) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), to_mat(image, bit_depth), {cv::IMWRITE_PNG_COMPRESSION, 6})) {
    throw std::runtime_error("write_png: failed to write " + path.string());
  }
}

Image hstack(const std::vector<Image>& frames) {
  if (frames.empty()) return {};
  const Image& first = frames.front();
  Image out(first.height, first.width * static_cast<int>(frames.size()), first.channels);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    require_same_shape(first, frames[f], "hstack");
    for (int y = 0; y < first.height; ++y) {
      std::copy_n(frames[f].pixels.begin() + frames[f].index(y, 0), first.width * first.channels,
                  out.pixels.begin() + out.index(y, static_cast<int>(f) * first.width));
    }
  }
  return out;
}

}  // namespace cae::data
