#include "shiftcal/rng.hpp"

#include <bit>

namespace shiftcal {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = mix64(master ^ fnv1a64(tag));
  for (auto idx : indices) h = mix64(h ^ mix64(idx + 0x632be59bd9b4e019ULL));
  return h;
}

std::uint64_t hash_reals(std::uint64_t seed, std::span<const double> values) {
  std::uint64_t h = mix64(seed);
  for (double v : values) {
    // +0.0 and -0.0 must hash identically
    const double canon = v == 0.0 ? 0.0 : v;
    h = mix64(h ^ std::bit_cast<std::uint64_t>(canon));
  }
  return h;
}

}  // namespace shiftcal
