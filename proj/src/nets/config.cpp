#include "cae/nets/config.hpp"

#include <string>

#include "cae/common/errors.hpp"

namespace cae::nets {

void ModelConfig::validate() const {
  if (image_size < 16 || image_size % 4 != 0) throw ConfigError("model: image_size must be a multiple of 4 and >= 16");
  if (channels < 1) throw ConfigError("model: channels must be positive");
  if (num_classes < 2) throw ConfigError("model: need at least two classes");
  if (class_code_dim < 1 || individual_channels < 1 || base_channels < 2 || discriminator_channels < 1) {
    throw ConfigError("model: widths must be positive");
  }
  if (residual_blocks < 0) throw ConfigError("model: residual_blocks must be >= 0");
}

void ClassifierConfig::validate() const {
  if (image_size < 8) throw ConfigError("classifier: image_size too small");
  if (channels < 1 || num_classes < 2 || width < 1) throw ConfigError("classifier: invalid widths");
}

namespace {

std::string activation_name(Activation a) { return a == Activation::silu ? "silu" : "leaky_relu"; }

Activation parse_activation(const std::string& s) {
  if (s == "silu") return Activation::silu;
  if (s == "leaky_relu") return Activation::leaky_relu;
  throw ConfigError("unknown activation '" + s + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"image_size", c.image_size},
       {"channels", c.channels},
       {"num_classes", c.num_classes},
       {"class_code_dim", c.class_code_dim},
       {"individual_channels", c.individual_channels},
       {"base_channels", c.base_channels},
       {"residual_blocks", c.residual_blocks},
       {"discriminator_channels", c.discriminator_channels},
       {"activation", activation_name(c.activation)}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  const ModelConfig d;
  c.image_size = j.value("image_size", d.image_size);
  c.channels = j.value("channels", d.channels);
  c.num_classes = j.value("num_classes", d.num_classes);
  c.class_code_dim = j.value("class_code_dim", d.class_code_dim);
  c.individual_channels = j.value("individual_channels", d.individual_channels);
  c.base_channels = j.value("base_channels", d.base_channels);
  c.residual_blocks = j.value("residual_blocks", d.residual_blocks);
  c.discriminator_channels = j.value("discriminator_channels", d.discriminator_channels);
  c.activation = parse_activation(j.value("activation", activation_name(d.activation)));
}

void to_json(nlohmann::json& j, const ClassifierConfig& c) {
  j = {{"image_size", c.image_size}, {"channels", c.channels}, {"num_classes", c.num_classes}, {"width", c.width}};
}

void from_json(const nlohmann::json& j, ClassifierConfig& c) {
  const ClassifierConfig d;
  c.image_size = j.value("image_size", d.image_size);
  c.channels = j.value("channels", d.channels);
  c.num_classes = j.value("num_classes", d.num_classes);
  c.width = j.value("width", d.width);
}

}  // namespace cae::nets
