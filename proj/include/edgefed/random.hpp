#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace edgefed {

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// SplitMix64 finalizer; a bijective mixer used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the named substream of a run seed. Adding a new stream name never
/// changes the values of existing streams.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view stream) noexcept;
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t index) noexcept;

/// Random source with platform-independent transforms. The engine is
/// std::mt19937_64 (fully specified by the standard); distributions are
/// implemented here because the std:: ones differ between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given rate (events per unit).
  double exponential(double rate);

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace edgefed
