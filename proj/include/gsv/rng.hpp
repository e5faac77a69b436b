#pragma once

// Counter-based random streams.
//
// Every random draw in the simulator comes from a Philox4x32-10 stream
// addressed by (seed, trial, purpose, index). Two processes that agree on
// those four values draw identical numbers regardless of the order in which
// streams are used, which is what lets the in-process protocol and the
// two-process wire session produce byte-identical transcripts.
//
// Stream splitting rule (recorded in every output file as `philox4x32-10`):
//   key     = (seed & 0xffffffff, seed >> 32)
//   counter = (block_lo, block_hi, index, (purpose << 24) | trial)
// with trial < 2^24 and index < 2^32.

#include <array>
#include <cstdint>
#include <limits>

namespace gsv {

inline constexpr const char* kRngName = "philox4x32-10";

enum class StreamPurpose : std::uint32_t {
  Verifier = 1,     // group selection and target choice
  Measurement = 2,  // per-register measurement outcomes (index = register id)
  Adversary = 3,    // prover-side strategy sampling
  Auxiliary = 4,    // tests and standalone sampling helpers
};

/// Raw Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint32_t trial, StreamPurpose purpose, std::uint32_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next64(); }

  std::uint32_t next32();
  std::uint64_t next64();

  /// Uniform integer in [0, bound). Rejection sampling, exact for every bound > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t streamWord_;
  std::uint32_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace gsv
