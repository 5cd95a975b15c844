#pragma once

#include <span>
#include <vector>

#include "cae/common/errors.hpp"
#include "cae/common/image.hpp"

namespace cae::nets {

using Probabilities = std::vector<double>;

/// Model-agnostic classifier adapter: the explanation pipeline only ever sees
/// input images and output probability vectors over the class set.
class BlackBoxClassifier {
 public:
  virtual ~BlackBoxClassifier() = default;

  virtual int num_classes() const = 0;
  // One probability vector per image; entries >= 0 summing to 1.
  virtual std::vector<Probabilities> classify(std::span<const Image> batch) const = 0;

  Probabilities classify(const Image& x) const { return classify(std::span<const Image>(&x, 1)).front(); }

  virtual bool differentiable() const { return false; }
  // d logit[class_index] / d x, same shape as x.
  virtual Image logit_gradient(const Image& x, int class_index) const;
};

std::size_t argmax(const Probabilities& p);

}  // namespace cae::nets
