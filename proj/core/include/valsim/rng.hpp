#pragma once

#include <cstdint>
#include <random>

namespace valsim {

/// Identifies one reproducible random stream. Equal specs give bit-identical
/// sequences; different stream indices under one master seed are independent.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// A derived spec for splitting one logical stream into chunks or retries.
  SeedSpec child(std::uint64_t index) const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Standard-normal variates from a seeded 64-bit Mersenne Twister via the
/// Marsaglia polar method. Output depends only on the SeedSpec, not on the
/// standard library's distribution implementation.
class NormalStream {
 public:
  explicit NormalStream(const SeedSpec& seed);

  double next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace valsim
