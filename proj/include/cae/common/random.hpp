#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cae {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent streams from a master seed.
std::uint64_t mix_seed(std::uint64_t value) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) noexcept;

// Distribution helpers with a fixed bit-level definition, so sequences do not
// depend on the standard library's distribution implementation.
double uniform01(Rng& rng) noexcept;
double uniform(Rng& rng, double lo, double hi) noexcept;
std::size_t uniform_index(Rng& rng, std::size_t n) noexcept;
double standard_normal(Rng& rng) noexcept;

template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::iter_swap(first + (i - 1), first + j);
  }
}

}  // namespace cae
