#pragma once

#include <cstddef>
#include <cstdint>

namespace mpsim {

// xoshiro256** with splitmix64 seeding. Owns its own normal/uniform transforms
// so that streams are bit-identical across standard library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  bool coin() { return (next_u64() >> 63) != 0; }
  /// Standard normal via Box–Muller (one variate per call).
  double normal();

 private:
  std::uint64_t state_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix64(std::uint64_t x);

/// Master seed plus a domain tag; (seed, index) maps to an independent stream.
class SeedSpec {
 public:
  explicit SeedSpec(std::uint64_t master_seed, std::uint64_t domain = 0)
      : master_(master_seed), domain_(domain) {}

  std::uint64_t master_seed() const { return master_; }
  /// Independent family for a different purpose (e.g. test matrices vs. columns).
  SeedSpec child(std::uint64_t tag) const { return SeedSpec(master_, mix64(domain_ ^ mix64(tag + 1))); }
  Stream stream(std::uint64_t index) const;

 private:
  std::uint64_t master_;
  std::uint64_t domain_;
};

}  // namespace mpsim
