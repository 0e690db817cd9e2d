#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace lqft {

// Event sets of a causal set; bit i is event i in canonical order.
using Bits = std::uint64_t;

constexpr std::size_t kMaxEvents = 64;

constexpr Bits bit(std::size_t i) { return Bits{1} << i; }

constexpr bool has(Bits b, std::size_t i) { return (b >> i) & 1u; }

constexpr Bits low_mask(std::size_t n) {
  return n >= 64 ? ~Bits{0} : (Bits{1} << n) - 1;
}

inline int popcount(Bits b) { return std::popcount(b); }

template <class F>
void for_each_bit(Bits b, F&& f) {
  while (b) {
    std::size_t i = static_cast<std::size_t>(std::countr_zero(b));
    f(i);
    b &= b - 1;
  }
}

inline std::vector<std::size_t> bit_list(Bits b) {
  std::vector<std::size_t> out;
  for_each_bit(b, [&](std::size_t i) { out.push_back(i); });
  return out;
}

}  // namespace lqft
