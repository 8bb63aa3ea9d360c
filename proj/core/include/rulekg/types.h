#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace rulekg {

using EntityId = std::int32_t;
using RelationId = std::int32_t;
using ConceptId = std::int32_t;

inline constexpr ConceptId kUnknownConcept = -1;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Packs two 32-bit ids into one 64-bit key for hash indices.
inline constexpr std::uint64_t PairKey(std::int32_t a, std::int32_t b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

inline constexpr std::uint64_t Mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    return static_cast<std::size_t>(
        Mix64(PairKey(t.head, t.tail) ^ Mix64(static_cast<std::uint64_t>(t.relation) + 1)));
  }
};

}  // namespace rulekg
