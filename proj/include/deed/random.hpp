#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace deed {

/// Seeded random source with portable output.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so every
/// derived variate (uniform, normal, integer range, shuffle) is computed here
/// from raw engine output, so streams do not depend on which standard library
/// the toolkit was built against.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_open_zero() { return 1.0 - uniform(); }

  /// Standard normal via the Box-Muller transform (the second variate is cached).
  double normal();

  /// Uniform integer in [0, bound). Uses rejection to stay unbiased.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates shuffle of the given indices.
  void shuffle(std::vector<std::size_t>& items);

  /// Derives an independent child seed; used to give sub-tasks their own streams.
  std::uint64_t fork_seed() { return next_u64() ^ 0x9E3779B97F4A7C15ULL; }

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace deed
