#pragma once

#include <cstdint>
#include <string_view>

#include "cae/data/dataset.hpp"
#include "cae/explain/saliency_map.hpp"
#include "cae/nets/blackbox.hpp"

namespace cae::eval {

enum class BaselineMethod { random, input_gradient };

BaselineMethod parse_baseline(std::string_view name);

// random: uniform map seeded by (seed, sample id). input_gradient: channel-summed
// |d logit[label] / d pixel|; throws CapabilityError for non-differentiable adapters.
explain::SaliencyMap baseline_saliency(BaselineMethod method, const data::ImageSample& sample,
                                       const nets::BlackBoxClassifier& classifier, std::uint64_t seed);

}  // namespace cae::eval
