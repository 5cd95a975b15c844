#include "cae/nets/networks.hpp"

#include <mutex>
#include <string>

#include "cae/common/errors.hpp"

namespace cae::nets {

namespace nn = torch::nn;

namespace {

nn::Conv2d conv(int in, int out, int kernel, int stride, int padding) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, kernel).stride(stride).padding(padding));
}

torch::Tensor activate(const torch::Tensor& x, Activation a) {
  return a == Activation::silu ? torch::silu(x) : torch::leaky_relu(x, 0.2);
}

struct ActivationLayerImpl : nn::Module {
  explicit ActivationLayerImpl(Activation a) : kind(a) {}
  torch::Tensor forward(const torch::Tensor& x) { return activate(x, kind); }
  Activation kind;
};
TORCH_MODULE(ActivationLayer);

// He-normal weights for the leaky slope in use and zero biases, so activations
// keep their scale through the deep decoder at initialisation.
void init_weights(nn::Module& module, Activation activation) {
  torch::NoGradGuard no_grad;
  const double slope = activation == Activation::silu ? 0.0 : 0.2;
  for (auto& m : module.modules(/*include_self=*/false)) {
    if (auto* c = m->as<nn::Conv2d>()) {
      nn::init::kaiming_normal_(c->weight, slope, torch::kFanIn, torch::kLeakyReLU);
      if (c->bias.defined()) nn::init::zeros_(c->bias);
    } else if (auto* l = m->as<nn::Linear>()) {
      nn::init::kaiming_normal_(l->weight, slope, torch::kFanIn, torch::kLeakyReLU);
      if (l->bias.defined()) nn::init::zeros_(l->bias);
    }
  }
}

}  // namespace

void require_image_batch(const torch::Tensor& x, int channels, int size, const char* what) {
  if (x.dim() != 4 || x.size(1) != channels || x.size(2) != size || x.size(3) != size) {
    throw ContractError(std::string(what) + ": expected [N, " + std::to_string(channels) + ", " + std::to_string(size) +
                        ", " + std::to_string(size) + "] input");
  }
}

ResidualBlockImpl::ResidualBlockImpl(int channels, Activation a) : activation(a) {
  conv1 = register_module("conv1", conv(channels, channels, 3, 1, 1));
  conv2 = register_module("conv2", conv(channels, channels, 3, 1, 1));
}

torch::Tensor ResidualBlockImpl::forward(const torch::Tensor& x) {
  return x + conv2(activate(conv1(x), activation));
}

EncoderImpl::EncoderImpl(const ModelConfig& cfg) : config(cfg) {
  config.validate();
  const int b = config.base_channels;
  const int t = 2 * b;
  trunk = register_module("trunk", nn::Sequential(conv(config.channels, b, 7, 1, 3), ActivationLayer(config.activation),
                                                  conv(b, t, 4, 2, 1), ActivationLayer(config.activation),
                                                  conv(t, t, 4, 2, 1), ActivationLayer(config.activation)));
  class_head = register_module("class_head", nn::Sequential(conv(t, t, 4, 2, 1), ActivationLayer(config.activation),
                                                            conv(t, t, 4, 2, 1), ActivationLayer(config.activation)));
  class_out = register_module("class_out", nn::Linear(2 * t, config.class_code_dim));
  individual_head = register_module("individual_head",
                                    nn::Sequential(ResidualBlock(t, config.activation),
                                                   conv(t, config.individual_channels, 3, 1, 1)));
}

torch::Tensor EncoderImpl::class_from_features(const torch::Tensor& h) {
  // Max pooling next to the average keeps a small motif from washing out of the code.
  const torch::Tensor f = class_head->forward(h);
  return class_out(torch::cat({f.mean({2, 3}), f.amax({2, 3})}, 1));
}

torch::Tensor EncoderImpl::individual_from_features(const torch::Tensor& h) { return individual_head->forward(h); }

std::pair<torch::Tensor, torch::Tensor> EncoderImpl::forward(const torch::Tensor& x) {
  require_image_batch(x, config.channels, config.image_size, "encode");
  const torch::Tensor h = trunk->forward(x);
  return {class_from_features(h), individual_from_features(h)};
}

torch::Tensor EncoderImpl::encode_class(const torch::Tensor& x) {
  require_image_batch(x, config.channels, config.image_size, "encode_class");
  return class_from_features(trunk->forward(x));
}

torch::Tensor EncoderImpl::encode_individual(const torch::Tensor& x) {
  require_image_batch(x, config.channels, config.image_size, "encode_individual");
  return individual_from_features(trunk->forward(x));
}

DecoderImpl::DecoderImpl(const ModelConfig& cfg) : config(cfg) {
  config.validate();
  const int b = config.base_channels;
  const int t = 2 * b;
  const int hidden = std::max(32, 4 * config.class_code_dim);
  stem = register_module("stem", conv(config.individual_channels, t, 3, 1, 1));
  // Two modulated convolutions per block, each with a scale and a shift per channel.
  style_mlp = register_module(
      "style_mlp", nn::Sequential(nn::Linear(config.class_code_dim, hidden), ActivationLayer(config.activation),
                                  nn::Linear(hidden, 2 * 2 * t * std::max(1, config.residual_blocks))));
  block_convs = register_module("block_convs", nn::ModuleList());
  for (int k = 0; k < 2 * config.residual_blocks; ++k) block_convs->push_back(conv(t, t, 3, 1, 1));
  upsample = register_module(
      "upsample",
      nn::Sequential(nn::Upsample(nn::UpsampleOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest)),
                     conv(t, b, 3, 1, 1), ActivationLayer(config.activation),
                     nn::Upsample(nn::UpsampleOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest)),
                     conv(b, b / 2, 3, 1, 1), ActivationLayer(config.activation), conv(b / 2, config.channels, 7, 1, 3),
                     nn::Sigmoid()));
}

torch::Tensor DecoderImpl::forward(const torch::Tensor& class_code, const torch::Tensor& individual) {
  const int grid = config.grid_size();
  if (class_code.dim() != 2 || class_code.size(1) != config.class_code_dim) {
    throw ContractError("decode: class code must be [N, " + std::to_string(config.class_code_dim) + "]");
  }
  if (individual.dim() != 4 || individual.size(1) != config.individual_channels || individual.size(2) != grid ||
      individual.size(3) != grid || individual.size(0) != class_code.size(0)) {
    throw ContractError("decode: individual code must be [N, " + std::to_string(config.individual_channels) + ", " +
                        std::to_string(grid) + ", " + std::to_string(grid) + "] matching the class code batch");
  }
  const int t = 2 * config.base_channels;
  torch::Tensor h = activate(stem(individual), config.activation);
  const torch::Tensor style = style_mlp->forward(class_code);
  auto modulate = [&](const torch::Tensor& x, int layer) {
    const torch::Tensor gamma = style.narrow(1, 2 * layer * t, t).unsqueeze(-1).unsqueeze(-1);
    const torch::Tensor beta = style.narrow(1, (2 * layer + 1) * t, t).unsqueeze(-1).unsqueeze(-1);
    return x * (1 + gamma) + beta;
  };
  for (int k = 0; k < config.residual_blocks; ++k) {
    auto c1 = block_convs[static_cast<std::size_t>(2 * k)]->as<nn::Conv2d>();
    auto c2 = block_convs[static_cast<std::size_t>(2 * k + 1)]->as<nn::Conv2d>();
    torch::Tensor r = activate(modulate(c1->forward(h), 2 * k), config.activation);
    r = modulate(c2->forward(r), 2 * k + 1);
    h = h + r;
  }
  if (config.residual_blocks == 0) h = modulate(h, 0);
  return upsample->forward(h);
}

DiscriminatorImpl::DiscriminatorImpl(const ModelConfig& cfg) : config(cfg) {
  config.validate();
  const int d = config.discriminator_channels;
  trunk = register_module("trunk", nn::Sequential(conv(config.channels, d, 4, 2, 1), ActivationLayer(config.activation),
                                                  conv(d, 2 * d, 4, 2, 1), ActivationLayer(config.activation),
                                                  conv(2 * d, 4 * d, 4, 2, 1), ActivationLayer(config.activation),
                                                  conv(4 * d, 4 * d, 3, 1, 1), ActivationLayer(config.activation)));
  realness = register_module("realness", nn::Linear(8 * d, 2));
  classes = register_module("classes", nn::Linear(8 * d, config.num_classes));
}

DiscriminatorOutput DiscriminatorImpl::forward(const torch::Tensor& x) {
  require_image_batch(x, config.channels, config.image_size, "discriminate");
  // Average and max pooling side by side: the max branch picks up small localised evidence.
  const torch::Tensor f = trunk->forward(x);
  const torch::Tensor h = torch::cat({f.mean({2, 3}), f.amax({2, 3})}, 1);
  return {realness(h), classes(h)};
}

ClassifierNetImpl::ClassifierNetImpl(const ClassifierConfig& cfg) : config(cfg) {
  config.validate();
  const int w = config.width;
  features = register_module(
      "features", nn::Sequential(conv(config.channels, w, 3, 1, 1), nn::ReLU(), nn::MaxPool2d(2), conv(w, 2 * w, 3, 1, 1),
                                 nn::ReLU(), nn::MaxPool2d(2), conv(2 * w, 4 * w, 3, 1, 1), nn::ReLU(),
                                 nn::AdaptiveMaxPool2d(1)));
  head = register_module("head", nn::Linear(4 * w, config.num_classes));
}

torch::Tensor ClassifierNetImpl::forward(const torch::Tensor& x) {
  require_image_batch(x, config.channels, config.image_size, "classify");
  return head(features->forward(x).flatten(1));
}

CaeNetworks::CaeNetworks(const ModelConfig& cfg, std::uint64_t seed) : config(cfg) {
  config.validate();
  torch::manual_seed(seed);
  encoder = Encoder(config);
  decoder = Decoder(config);
  discriminator = Discriminator(config);
  init_weights(*encoder, config.activation);
  init_weights(*decoder, config.activation);
  init_weights(*discriminator, config.activation);
  // The style head starts near the identity modulation (small scale and shift).
  torch::NoGradGuard no_grad;
  auto* last = decoder->style_mlp[decoder->style_mlp->size() - 1]->as<nn::Linear>();
  last->weight.mul_(0.1);
}

void CaeNetworks::to(torch::Dtype dtype) {
  encoder->to(dtype);
  decoder->to(dtype);
  discriminator->to(dtype);
}

std::vector<torch::Tensor> CaeNetworks::generator_parameters() const {
  std::vector<torch::Tensor> out = encoder->parameters();
  for (auto& p : decoder->parameters()) out.push_back(p);
  return out;
}

void append_module_arrays(const torch::nn::Module& module, const std::string& prefix, std::vector<NamedArray>& out) {
  auto add = [&](const std::string& name, const torch::Tensor& t) {
    const torch::Tensor c = t.detach().to(torch::kFloat32).contiguous();
    NamedArray a;
    a.name = prefix + "." + name;
    a.shape.assign(c.sizes().begin(), c.sizes().end());
    a.data.assign(c.data_ptr<float>(), c.data_ptr<float>() + c.numel());
    out.push_back(std::move(a));
  };
  for (const auto& p : module.named_parameters()) add(p.key(), p.value());
  for (const auto& b : module.named_buffers()) add(b.key(), b.value());
}

void load_module_arrays(torch::nn::Module& module, const std::string& prefix, const NetworkParams& params) {
  torch::NoGradGuard no_grad;
  auto assign = [&](const std::string& name, torch::Tensor& t) {
    const NamedArray* a = params.find(prefix + "." + name);
    if (!a) throw ConfigError("checkpoint: missing array '" + prefix + "." + name + "'");
    std::vector<std::int64_t> shape(t.sizes().begin(), t.sizes().end());
    if (shape != a->shape) throw ConfigError("checkpoint: shape mismatch for '" + a->name + "'");
    auto src = torch::from_blob(const_cast<float*>(a->data.data()), t.sizes(), torch::kFloat32);
    t.copy_(src.to(t.dtype()));
  };
  for (auto& p : module.named_parameters()) assign(p.key(), p.value());
  for (auto& b : module.named_buffers()) assign(b.key(), b.value());
}

NetworkParams CaeNetworks::export_params() const {
  NetworkParams params;
  params.component = "cae";
  params.config = config;
  append_module_arrays(*encoder, "encoder", params.arrays);
  append_module_arrays(*decoder, "decoder", params.arrays);
  append_module_arrays(*discriminator, "discriminator", params.arrays);
  return params;
}

void CaeNetworks::import_params(const NetworkParams& params) {
  if (params.component != "cae") throw ConfigError("checkpoint: expected a 'cae' checkpoint, got '" + params.component + "'");
  load_module_arrays(*encoder, "encoder", params);
  load_module_arrays(*decoder, "decoder", params);
  load_module_arrays(*discriminator, "discriminator", params);
}

CaeNetworks CaeNetworks::from_params(const NetworkParams& params) {
  CaeNetworks nets(params.config.get<ModelConfig>());
  nets.import_params(params);
  return nets;
}

void set_deterministic(int threads) {
  torch::set_num_threads(threads);
  // The interop pool can be sized only once per process.
  static std::once_flag interop;
  std::call_once(interop, [threads] { at::set_num_interop_threads(threads); });
}

}  // namespace cae::nets
