#pragma once

#include <memory>
#include <utility>

#include <torch/torch.h>

#include "cae/nets/networks.hpp"
#include "cae/training/losses.hpp"

namespace cae::training {

/// Tensor-level encoder/decoder pair used by the code-swap pass.
class Autoencoder {
 public:
  virtual ~Autoencoder() = default;
  virtual std::pair<torch::Tensor, torch::Tensor> encode(const torch::Tensor& x) = 0;
  virtual torch::Tensor decode(const torch::Tensor& c, const torch::Tensor& s) = 0;
};

class NetworksAutoencoder final : public Autoencoder {
 public:
  explicit NetworksAutoencoder(std::shared_ptr<nets::CaeNetworks> networks) : networks_(std::move(networks)) {}
  std::pair<torch::Tensor, torch::Tensor> encode(const torch::Tensor& x) override { return networks_->encoder->forward(x); }
  torch::Tensor decode(const torch::Tensor& c, const torch::Tensor& s) override {
    return networks_->decoder->forward(c, s);
  }

 private:
  std::shared_ptr<nets::CaeNetworks> networks_;
};

/// Every intermediate of one two-round code-swap pass.
struct ForwardBundle {
  torch::Tensor x_A, x_B;
  torch::Tensor c_A, s_A, c_B, s_B;
  torch::Tensor swap_A, swap_B;      // x'_A = G(c_B, s_A), x'_B = G(c_A, s_B)
  torch::Tensor c1_A, s1_A, c1_B, s1_B;  // re-encodings of x'_A, x'_B
  torch::Tensor cycle_A, cycle_B;    // x''_A = G(c_A, s'_A), x''_B = G(c_B, s'_B)
  torch::Tensor recon_A, recon_B;    // G(c_A, s_A), G(c_B, s_B)
};

// Throws ContractError when x_A and x_B differ in shape.
ForwardBundle bbcfe_forward(const torch::Tensor& x_A, const torch::Tensor& x_B, Autoencoder& model);

// Reconstruction, code and cycle terms from the bundle, plus adversarial and
// class terms from the realness / class logits of (x'_A, x'_B).
GeneratorLossTerms generator_terms(const ForwardBundle& bundle, const torch::Tensor& swap_A_realness,
                                   const torch::Tensor& swap_A_class, const torch::Tensor& swap_B_realness,
                                   const torch::Tensor& swap_B_class, const torch::Tensor& y_A, const torch::Tensor& y_B);

}  // namespace cae::training
