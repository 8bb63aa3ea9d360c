#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rulekg {

using Rng = std::mt19937_64;

// Derives an independent seed for a named subsystem ("init", "train", ...)
// from the single run seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream);

// Portable draws: unlike the std distributions these give the same sequence
// on every standard library.
std::uint64_t UniformIndex(Rng& rng, std::uint64_t n);
double UniformUnit(Rng& rng);
double UniformReal(Rng& rng, double lo, double hi);
bool FairCoin(Rng& rng);

template <typename T>
void Shuffle(T* data, std::size_t n, Rng& rng) {
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(UniformIndex(rng, i));
    std::swap(data[i - 1], data[j]);
  }
}

}  // namespace rulekg
