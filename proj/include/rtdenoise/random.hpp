#pragma once

#include <cstdint>
#include <random>

namespace rtdenoise {

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the uniform and normal conversions
// below are spelled out here because the standard distributions are
// implementation-defined.
//
//   uniform01: (x >> 11) * 2^-53, in [0, 1)
//   normal:    Box-Muller on (u1, u2) with u1 = 1 - uniform01 in (0, 1];
//              returns r*cos(2*pi*u2), then r*sin(2*pi*u2) on the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double normal();
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rtdenoise
