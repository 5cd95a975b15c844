#include "cae/nets/blackbox.hpp"

#include <algorithm>

namespace cae::nets {

Image BlackBoxClassifier::logit_gradient(const Image&, int) const {
  throw CapabilityError("classifier adapter does not expose gradients");
}

std::size_t argmax(const Probabilities& p) {
  if (p.empty()) throw ContractError("argmax: empty probability vector");
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace cae::nets
