#pragma once

#include <array>
#include <string_view>

#include <json.hpp>
#include <torch/torch.h>

namespace cae::training {

struct LossWeights {
  double lambda1 = 10.0;  // image reconstruction
  double lambda2 = 1.0;   // class-code reconstruction
  double lambda3 = 1.0;   // individual-code reconstruction
  double lambda4 = 10.0;  // cycle
  double lambda5 = 1.0;   // adversarial (generator)
  double lambda6 = 1.0;   // classification (generator)
  double phi1 = 1.0;      // adversarial (discriminator)
  double phi2 = 2.0;      // classification (discriminator)

  // Throws ConfigError when any weight is negative or non-finite.
  void validate() const;
};

void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

// All image/code terms are mean absolute differences over every element.
torch::Tensor loss_recon_image(const torch::Tensor& x, const torch::Tensor& x_hat);
std::pair<torch::Tensor, torch::Tensor> loss_recon_codes(const torch::Tensor& c, const torch::Tensor& c_hat,
                                                         const torch::Tensor& s, const torch::Tensor& s_hat);
torch::Tensor loss_cycle(const torch::Tensor& x, const torch::Tensor& x_cycled);

// Batch mean of -log softmax(logits)[index]; index 1 = real, 0 = fake. Logits are [N, 2] or [2].
torch::Tensor realness_nll(const torch::Tensor& realness_logits, int index);
torch::Tensor loss_adversarial_gen(const torch::Tensor& realness_logits);
// Cross-entropy against `target` (one per row, or a single class for all rows).
// Throws ContractError when a target lies outside [0, num_classes).
torch::Tensor loss_class_gen(const torch::Tensor& class_logits, const torch::Tensor& target);
torch::Tensor loss_class_gen(const torch::Tensor& class_logits, int target);

/// The twelve generator sub-losses, one per loss kind and direction.
struct GeneratorLossTerms {
  torch::Tensor x_A, x_B;          // image reconstruction
  torch::Tensor c_A, c_B;          // class-code reconstruction
  torch::Tensor s_A, s_B;          // individual-code reconstruction
  torch::Tensor cyc_A, cyc_B;      // two-round cycle
  torch::Tensor adv_A2B, adv_B2A;  // realness of swapped syntheses
  torch::Tensor cla_A2B, cla_B2A;  // class of swapped syntheses

  static constexpr std::array<std::string_view, 12> kNames = {"x_A",   "x_B",   "c_A",     "c_B",     "s_A",     "s_B",
                                                             "cyc_A", "cyc_B", "adv_A2B", "adv_B2A", "cla_A2B", "cla_B2A"};
  std::array<const torch::Tensor*, 12> all() const;
};

// Throws ContractError naming the first undefined term.
torch::Tensor total_generator_loss(const GeneratorLossTerms& terms, const LossWeights& weights);

struct DiscriminatorLossTerms {
  torch::Tensor adv_A2B, adv_B2A;  // fake swapped synthesis vs the real image of its target class
  torch::Tensor cla_A, cla_B;      // class head on real images only

  static constexpr std::array<std::string_view, 4> kNames = {"d_adv_A2B", "d_adv_B2A", "d_cla_A", "d_cla_B"};
  std::array<const torch::Tensor*, 4> all() const;
};

// -log softmax(fake)[0] - log softmax(real)[1], each averaged over the batch.
torch::Tensor loss_adversarial_disc(const torch::Tensor& fake_realness_logits, const torch::Tensor& real_realness_logits);

// Build the four terms from raw discriminator logits. Inputs are, in order, the
// outputs for x_A, x_B, x'_A = G(c_B, s_A) and x'_B = G(c_A, s_B).
DiscriminatorLossTerms discriminator_terms(const torch::Tensor& real_A_realness, const torch::Tensor& real_A_class,
                                           const torch::Tensor& real_B_realness, const torch::Tensor& real_B_class,
                                           const torch::Tensor& fake_A_realness, const torch::Tensor& fake_B_realness,
                                           const torch::Tensor& y_A, const torch::Tensor& y_B);

torch::Tensor discriminator_loss(const DiscriminatorLossTerms& terms, const LossWeights& weights);

}  // namespace cae::training
