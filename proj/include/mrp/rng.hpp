#pragma once

#include <cstdint>
#include <random>

namespace mrp {

struct Seed {
  std::uint64_t value = 0;
};

// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Sub-seed for replicate `index` of a run started from `master`. Distinct
// indices give distinct, reproducible streams.
Seed derive_seed(Seed master, std::uint64_t index) noexcept;

// Deterministic random source. The engine (mt19937_64) is bit-specified by the
// standard and the variate transforms below are hand-written, so a seed
// reproduces the same stream on every conforming toolchain.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open();

  // Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mrp
