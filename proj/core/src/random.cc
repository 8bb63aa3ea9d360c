#include "rulekg/random.h"

#include <limits>

#include "rulekg/types.h"

namespace rulekg {

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream) {
  // FNV-1a over the stream name, then a splitmix-style finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(seed + 0x9e3779b97f4a7c15ULL * (h | 1));
}

std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  // Rejection sampling on the top of the range keeps draws unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double UniformUnit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double UniformReal(Rng& rng, double lo, double hi) { return lo + (hi - lo) * UniformUnit(rng); }

bool FairCoin(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace rulekg
