#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "cae/data/dataset.hpp"
#include "cae/nets/blackbox.hpp"
#include "cae/nets/codes.hpp"
#include "cae/nets/networks.hpp"

namespace cae::nets {

// HWC images -> [N, C, H, W] float32. Throws ContractError on empty or mixed shapes.
torch::Tensor images_to_tensor(std::span<const Image> images);
std::vector<Image> tensor_to_images(const torch::Tensor& batch);

torch::Tensor class_codes_to_tensor(std::span<const ClassCode> codes, int dim);
torch::Tensor individuals_to_tensor(std::span<const IndividualCode> codes);

/// Encoder/decoder pair of a trained CAE behind the value-type interface.
class TorchCodeModel final : public CodeModel {
 public:
  explicit TorchCodeModel(std::shared_ptr<CaeNetworks> networks, int batch_size = 64);

  int class_code_dim() const override;
  std::vector<EncodedImage> encode(std::span<const Image> batch) const override;
  std::vector<Image> decode(std::span<const ClassCode> class_codes,
                            std::span<const IndividualCode> individuals) const override;
  using CodeModel::decode;
  using CodeModel::encode;

  const ModelConfig& config() const { return networks_->config; }

 private:
  std::shared_ptr<CaeNetworks> networks_;
  int batch_size_;
};

/// Convolutional classifier exposing probabilities and input gradients.
class TorchClassifier final : public BlackBoxClassifier {
 public:
  TorchClassifier() = default;
  explicit TorchClassifier(ClassifierNet net);

  static TorchClassifier from_params(const NetworkParams& params);
  NetworkParams export_params() const;

  bool loaded() const noexcept { return !net_.is_empty(); }
  int num_classes() const override;
  std::vector<Probabilities> classify(std::span<const Image> batch) const override;
  using BlackBoxClassifier::classify;
  bool differentiable() const override { return true; }
  Image logit_gradient(const Image& x, int class_index) const override;

  ClassifierNet& net() { return net_; }

 private:
  void require_loaded() const;

  mutable ClassifierNet net_{nullptr};
};

struct ClassifierTrainConfig {
  int epochs = 6;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double flip_probability = 0.5;
  std::uint64_t seed = 0;
};

struct ClassifierTrainReport {
  std::vector<double> epoch_loss;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Throws DivergenceError (with an empty checkpoint reference) on a non-finite loss.
TorchClassifier train_classifier(const std::vector<data::ImageSample>& train, const std::vector<data::ImageSample>& test,
                                 const ClassifierConfig& config, const ClassifierTrainConfig& train_config,
                                 ClassifierTrainReport* report = nullptr);

double accuracy(const BlackBoxClassifier& classifier, const std::vector<data::ImageSample>& samples, int batch_size = 128);

}  // namespace cae::nets
