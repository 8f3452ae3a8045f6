#pragma once

#include <cstdint>
#include <random>

namespace dbandit {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to turn (parent seed, tag) pairs into
// statistically independent engine seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for substream `tag` of `parent`. Distinct tags give
// unrelated streams; the mapping is fixed so results replay exactly.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
  return mix64(mix64(parent) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// Substream tags used inside one replication.
enum class Stream : std::uint64_t {
  kInstance = 0,  // sampled means and per-arm delay parameters
  kReward = 1,
  kDelay = 2,
  kPolicy = 3,
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream s) noexcept {
  return derive_seed(parent, static_cast<std::uint64_t>(s));
}

// Seed of replication `index` under `master_seed`.
constexpr std::uint64_t replication_seed(std::uint64_t master_seed,
                                         std::uint64_t index) noexcept {
  return derive_seed(master_seed, 0x5245504cULL + (index << 8));
}

}  // namespace dbandit
