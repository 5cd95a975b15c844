#include "cae/training/bbcfe.hpp"

#include "cae/common/errors.hpp"

namespace cae::training {

ForwardBundle bbcfe_forward(const torch::Tensor& x_A, const torch::Tensor& x_B, Autoencoder& model) {
  if (x_A.sizes() != x_B.sizes()) throw ContractError("bbcfe_forward: x_A and x_B must share one shape");
  const std::int64_t n = x_A.size(0);
  ForwardBundle f;
  f.x_A = x_A;
  f.x_B = x_B;

  auto [c, s] = model.encode(torch::cat({x_A, x_B}));
  f.c_A = c.narrow(0, 0, n);
  f.c_B = c.narrow(0, n, n);
  f.s_A = s.narrow(0, 0, n);
  f.s_B = s.narrow(0, n, n);

  // Swapped syntheses and plain reconstructions share one decoder call.
  const torch::Tensor decoded = model.decode(torch::cat({f.c_B, f.c_A, f.c_A, f.c_B}), torch::cat({f.s_A, f.s_B, f.s_A, f.s_B}));
  f.swap_A = decoded.narrow(0, 0, n);
  f.swap_B = decoded.narrow(0, n, n);
  f.recon_A = decoded.narrow(0, 2 * n, n);
  f.recon_B = decoded.narrow(0, 3 * n, n);

  auto [c1, s1] = model.encode(decoded.narrow(0, 0, 2 * n));
  f.c1_A = c1.narrow(0, 0, n);
  f.c1_B = c1.narrow(0, n, n);
  f.s1_A = s1.narrow(0, 0, n);
  f.s1_B = s1.narrow(0, n, n);

  const torch::Tensor cycled = model.decode(torch::cat({f.c_A, f.c_B}), s1);
  f.cycle_A = cycled.narrow(0, 0, n);
  f.cycle_B = cycled.narrow(0, n, n);
  return f;
}

GeneratorLossTerms generator_terms(const ForwardBundle& f, const torch::Tensor& swap_A_realness,
                                   const torch::Tensor& swap_A_class, const torch::Tensor& swap_B_realness,
                                   const torch::Tensor& swap_B_class, const torch::Tensor& y_A, const torch::Tensor& y_B) {
  GeneratorLossTerms t;
  t.x_A = loss_recon_image(f.x_A, f.recon_A);
  t.x_B = loss_recon_image(f.x_B, f.recon_B);
  // x'_B = G(c_A, s_B) must re-encode to c_A; x'_A = G(c_B, s_A) must keep s_A.
  std::tie(t.c_A, t.s_A) = loss_recon_codes(f.c_A, f.c1_B, f.s_A, f.s1_A);
  std::tie(t.c_B, t.s_B) = loss_recon_codes(f.c_B, f.c1_A, f.s_B, f.s1_B);
  t.cyc_A = loss_cycle(f.x_A, f.cycle_A);
  t.cyc_B = loss_cycle(f.x_B, f.cycle_B);
  t.adv_A2B = loss_adversarial_gen(swap_A_realness);
  t.adv_B2A = loss_adversarial_gen(swap_B_realness);
  t.cla_A2B = loss_class_gen(swap_A_class, y_B);
  t.cla_B2A = loss_class_gen(swap_B_class, y_A);
  return t;
}

}  // namespace cae::training
