#pragma once

#include <utility>

#include <torch/torch.h>

#include "cae/nets/checkpoint.hpp"
#include "cae/nets/config.hpp"

namespace cae::nets {

struct DiscriminatorOutput {
  torch::Tensor realness_logits;  // [N, 2]: index 0 = fake, index 1 = real
  torch::Tensor class_logits;     // [N, num_classes]
};

// Throws ContractError unless x is [N, channels, size, size].
void require_image_batch(const torch::Tensor& x, int channels, int size, const char* what);

struct ResidualBlockImpl : torch::nn::Module {
  ResidualBlockImpl(int channels, Activation activation);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr};
  Activation activation;
};
TORCH_MODULE(ResidualBlock);

/// Shared convolutional trunk (two stride-2 stages) feeding a class head
/// (further downsampling, global pooling, linear map to the class code) and an
/// individual head that keeps the /4 grid.
struct EncoderImpl : torch::nn::Module {
  explicit EncoderImpl(const ModelConfig& config);

  std::pair<torch::Tensor, torch::Tensor> forward(const torch::Tensor& x);
  torch::Tensor encode_class(const torch::Tensor& x);
  torch::Tensor encode_individual(const torch::Tensor& x);

  ModelConfig config;
  torch::nn::Sequential trunk{nullptr};
  torch::nn::Sequential class_head{nullptr};
  torch::nn::Linear class_out{nullptr};
  torch::nn::Sequential individual_head{nullptr};

 private:
  torch::Tensor class_from_features(const torch::Tensor& h);
  torch::Tensor individual_from_features(const torch::Tensor& h);
};
TORCH_MODULE(Encoder);

/// Residual blocks on the individual grid whose activations are scaled and
/// shifted per channel by affine parameters predicted from the class code,
/// followed by two nearest-neighbour x2 upsampling stages and a sigmoid output.
struct DecoderImpl : torch::nn::Module {
  explicit DecoderImpl(const ModelConfig& config);

  torch::Tensor forward(const torch::Tensor& class_code, const torch::Tensor& individual);

  ModelConfig config;
  torch::nn::Conv2d stem{nullptr};
  torch::nn::Sequential style_mlp{nullptr};
  torch::nn::ModuleList block_convs{nullptr};
  torch::nn::Sequential upsample{nullptr};
};
TORCH_MODULE(Decoder);

/// Convolutional trunk with a realness head and a class head.
struct DiscriminatorImpl : torch::nn::Module {
  explicit DiscriminatorImpl(const ModelConfig& config);

  DiscriminatorOutput forward(const torch::Tensor& x);

  ModelConfig config;
  torch::nn::Sequential trunk{nullptr};
  torch::nn::Linear realness{nullptr};
  torch::nn::Linear classes{nullptr};
};
TORCH_MODULE(Discriminator);

/// Small convolutional image classifier used as the black box under explanation.
struct ClassifierNetImpl : torch::nn::Module {
  explicit ClassifierNetImpl(const ClassifierConfig& config);

  torch::Tensor forward(const torch::Tensor& x);  // logits

  ClassifierConfig config;
  torch::nn::Sequential features{nullptr};
  torch::nn::Linear head{nullptr};
};
TORCH_MODULE(ClassifierNet);

struct CaeNetworks {
  explicit CaeNetworks(const ModelConfig& config, std::uint64_t seed = 0);

  ModelConfig config;
  Encoder encoder{nullptr};
  Decoder decoder{nullptr};
  Discriminator discriminator{nullptr};

  void to(torch::Dtype dtype);
  std::vector<torch::Tensor> generator_parameters() const;

  NetworkParams export_params() const;
  // Throws ConfigError when shapes or names disagree with this architecture.
  void import_params(const NetworkParams& params);
  static CaeNetworks from_params(const NetworkParams& params);
};

// Flatten a module's parameters and buffers into named arrays (prefix + "." + name).
void append_module_arrays(const torch::nn::Module& module, const std::string& prefix, std::vector<NamedArray>& out);
void load_module_arrays(torch::nn::Module& module, const std::string& prefix, const NetworkParams& params);

// Single-threaded intra-op work makes forward/backward bitwise reproducible.
void set_deterministic(int threads = 1);

}  // namespace cae::nets
