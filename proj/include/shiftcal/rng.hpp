#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace shiftcal {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a master seed, a purpose tag and
/// a list of indices. Same arguments always give the same seed, so work can
/// be scheduled in any order without changing results.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices = {});

/// Folds the bit patterns of real values into a seed.
std::uint64_t hash_reals(std::uint64_t seed, std::span<const double> values);

/// FNV-1a over a byte string, used for config hashes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace shiftcal
