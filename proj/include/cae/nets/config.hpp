#pragma once

#include <json.hpp>

namespace cae::nets {

enum class Activation { leaky_relu, silu };

/// Shapes and widths of the encoder / decoder / discriminator triple.
struct ModelConfig {
  int image_size = 64;
  int channels = 1;
  int num_classes = 2;
  int class_code_dim = 8;
  int individual_channels = 64;  // individual code is individual_channels x image_size/4 x image_size/4
  int base_channels = 32;
  int residual_blocks = 2;
  int discriminator_channels = 32;
  Activation activation = Activation::leaky_relu;

  int grid_size() const noexcept { return image_size / 4; }
  // image_size must be a positive multiple of 4; throws ConfigError.
  void validate() const;
};

struct ClassifierConfig {
  int image_size = 64;
  int channels = 1;
  int num_classes = 2;
  int width = 16;

  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const ClassifierConfig& c);
void from_json(const nlohmann::json& j, ClassifierConfig& c);

}  // namespace cae::nets
