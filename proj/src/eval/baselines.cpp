#include "cae/eval/baselines.hpp"

#include <cmath>
#include <string>

#include "cae/common/random.hpp"

namespace cae::eval {

BaselineMethod parse_baseline(std::string_view name) {
  if (name == "random") return BaselineMethod::random;
  if (name == "input_gradient" || name == "gradient") return BaselineMethod::input_gradient;
  throw ContractError("unknown baseline '" + std::string(name) + "'");
}

explain::SaliencyMap baseline_saliency(BaselineMethod method, const data::ImageSample& sample,
                                       const nets::BlackBoxClassifier& classifier, std::uint64_t seed) {
  const Image& x = sample.pixels;
  explain::SaliencyMap map(x.height, x.width, explain::SaliencyMode::baseline);
  if (method == BaselineMethod::random) {
    Rng rng(derive_seed(derive_seed(seed, "random-saliency"), sample.id));
    for (float& v : map.values) v = static_cast<float>(uniform01(rng));
    return map;
  }
  if (!classifier.differentiable()) {
    throw CapabilityError("input_gradient baseline needs a differentiable classifier");
  }
  const Image grad = classifier.logit_gradient(x, sample.label.index);
  require_same_shape(x, grad, "input_gradient");
  for (int y = 0; y < x.height; ++y) {
    for (int c = 0; c < x.width; ++c) {
      float acc = 0.0f;
      for (int ch = 0; ch < x.channels; ++ch) acc += std::fabs(grad.at(y, c, ch));
      map.at(y, c) = acc;
    }
  }
  return map;
}

}  // namespace cae::eval
