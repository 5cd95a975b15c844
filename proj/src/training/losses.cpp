#include "cae/training/losses.hpp"

#include <cmath>
#include <string>

#include "cae/common/errors.hpp"

namespace cae::training {

void LossWeights::validate() const {
  for (double w : {lambda1, lambda2, lambda3, lambda4, lambda5, lambda6, phi1, phi2}) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("loss weights must be finite and non-negative");
  }
}

void to_json(nlohmann::json& j, const LossWeights& w) {
  j = nlohmann::json{{"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"lambda3", w.lambda3}, {"lambda4", w.lambda4},
                     {"lambda5", w.lambda5}, {"lambda6", w.lambda6}, {"phi1", w.phi1},       {"phi2", w.phi2}};
}

void from_json(const nlohmann::json& j, LossWeights& w) {
  w = LossWeights{};
  w.lambda1 = j.value("lambda1", w.lambda1);
  w.lambda2 = j.value("lambda2", w.lambda2);
  w.lambda3 = j.value("lambda3", w.lambda3);
  w.lambda4 = j.value("lambda4", w.lambda4);
  w.lambda5 = j.value("lambda5", w.lambda5);
  w.lambda6 = j.value("lambda6", w.lambda6);
  w.phi1 = j.value("phi1", w.phi1);
  w.phi2 = j.value("phi2", w.phi2);
  w.validate();
}

namespace {

void require_same_sizes(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (a.sizes() != b.sizes()) throw ContractError(std::string(what) + ": operands differ in shape");
}

torch::Tensor as_rows(const torch::Tensor& logits) { return logits.dim() == 1 ? logits.unsqueeze(0) : logits; }

}  // namespace

torch::Tensor loss_recon_image(const torch::Tensor& x, const torch::Tensor& x_hat) {
  require_same_sizes(x, x_hat, "loss_recon_image");
  return (x - x_hat).abs().mean();
}

std::pair<torch::Tensor, torch::Tensor> loss_recon_codes(const torch::Tensor& c, const torch::Tensor& c_hat,
                                                         const torch::Tensor& s, const torch::Tensor& s_hat) {
  require_same_sizes(c, c_hat, "loss_recon_codes (class)");
  require_same_sizes(s, s_hat, "loss_recon_codes (individual)");
  return {(c - c_hat).abs().mean(), (s - s_hat).abs().mean()};
}

torch::Tensor loss_cycle(const torch::Tensor& x, const torch::Tensor& x_cycled) {
  require_same_sizes(x, x_cycled, "loss_cycle");
  return (x - x_cycled).abs().mean();
}

torch::Tensor realness_nll(const torch::Tensor& realness_logits, int index) {
  const torch::Tensor rows = as_rows(realness_logits);
  if (rows.dim() != 2 || rows.size(1) != 2) throw ContractError("realness logits must have length 2");
  return -torch::log_softmax(rows, 1).select(1, index).mean();
}

torch::Tensor loss_adversarial_gen(const torch::Tensor& realness_logits) { return realness_nll(realness_logits, 1); }

torch::Tensor loss_class_gen(const torch::Tensor& class_logits, const torch::Tensor& target) {
  const torch::Tensor rows = as_rows(class_logits);
  if (rows.dim() != 2) throw ContractError("class logits must be [N, classes]");
  const std::int64_t k = rows.size(1);
  torch::Tensor t = target.to(torch::kLong).reshape({-1});
  if (t.numel() == 1 && rows.size(0) != 1) t = t.expand({rows.size(0)});
  if (t.numel() != rows.size(0)) throw ContractError("loss_class_gen: one target per row required");
  if (t.numel() > 0 && (t.min().item<std::int64_t>() < 0 || t.max().item<std::int64_t>() >= k)) {
    throw ContractError("loss_class_gen: target class out of range");
  }
  return torch::nn::functional::cross_entropy(rows, t);
}

torch::Tensor loss_class_gen(const torch::Tensor& class_logits, int target) {
  return loss_class_gen(class_logits, torch::tensor(static_cast<std::int64_t>(target)));
}

std::array<const torch::Tensor*, 12> GeneratorLossTerms::all() const {
  return {&x_A, &x_B, &c_A, &c_B, &s_A, &s_B, &cyc_A, &cyc_B, &adv_A2B, &adv_B2A, &cla_A2B, &cla_B2A};
}

torch::Tensor total_generator_loss(const GeneratorLossTerms& t, const LossWeights& w) {
  const auto terms = t.all();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!terms[i]->defined()) {
      throw ContractError("total_generator_loss: missing term " + std::string(GeneratorLossTerms::kNames[i]));
    }
  }
  return w.lambda1 * (t.x_A + t.x_B) + w.lambda2 * (t.c_A + t.c_B) + w.lambda3 * (t.s_A + t.s_B) +
         w.lambda4 * (t.cyc_A + t.cyc_B) + w.lambda5 * (t.adv_A2B + t.adv_B2A) + w.lambda6 * (t.cla_A2B + t.cla_B2A);
}

std::array<const torch::Tensor*, 4> DiscriminatorLossTerms::all() const { return {&adv_A2B, &adv_B2A, &cla_A, &cla_B}; }

torch::Tensor loss_adversarial_disc(const torch::Tensor& fake_realness_logits, const torch::Tensor& real_realness_logits) {
  return realness_nll(fake_realness_logits, 0) + realness_nll(real_realness_logits, 1);
}

DiscriminatorLossTerms discriminator_terms(const torch::Tensor& real_A_realness, const torch::Tensor& real_A_class,
                                           const torch::Tensor& real_B_realness, const torch::Tensor& real_B_class,
                                           const torch::Tensor& fake_A_realness, const torch::Tensor& fake_B_realness,
                                           const torch::Tensor& y_A, const torch::Tensor& y_B) {
  DiscriminatorLossTerms t;
  // x'_A carries class B, so it competes with the real x_B; symmetric for x'_B.
  t.adv_A2B = loss_adversarial_disc(fake_A_realness, real_B_realness);
  t.adv_B2A = loss_adversarial_disc(fake_B_realness, real_A_realness);
  if (real_A_class.defined()) t.cla_A = loss_class_gen(real_A_class, y_A);
  if (real_B_class.defined()) t.cla_B = loss_class_gen(real_B_class, y_B);
  return t;
}

torch::Tensor discriminator_loss(const DiscriminatorLossTerms& t, const LossWeights& w) {
  const auto terms = t.all();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!terms[i]->defined()) {
      throw ContractError("discriminator_loss: missing term " + std::string(DiscriminatorLossTerms::kNames[i]));
    }
  }
  return w.phi1 * (t.adv_A2B + t.adv_B2A) + w.phi2 * (t.cla_A + t.cla_B);
}

}  // namespace cae::training
