#pragma once

#include <cstdint>

#include "cans/matrix.hpp"

namespace cans {

// Deterministic random stream used everywhere a seed appears on the CLI.
// The construction is pinned so independent implementations can reproduce
// matrices bit for bit:
//
//   state seeding   splitmix64: z += 0x9E3779B97F4A7C15;
//                   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//                   z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//                   return z ^ (z >> 31);
//                   s[0..3] = four successive splitmix64 outputs of the seed.
//   core generator  xoshiro256++: rotl(s0 + s3, 23) + s0, with the standard
//                   xor-shift state update (t = s1 << 17; s2^=s0; s3^=s1;
//                   s1^=s2; s0^=s3; s2^=t; s3 = rotl(s3, 45)).
//   uniform         u = (next() >> 11) * 2^-53  in [0, 1).
//   gaussian        Box-Muller on consecutive uniforms u1, u2:
//                   r = sqrt(-2 ln(1 - u1)),
//                   z0 = r cos(2 pi u2), z1 = r sin(2 pi u2);
//                   pairs consumed in order, z0 first.
//   matrices        filled row-major with consecutive gaussians; a trailing
//                   odd entry uses the pair's z0 and discards z1.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next();
};

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed);
  std::uint64_t next();
  double uniform();  // [0, 1), 53-bit

 private:
  std::uint64_t s_[4];
};

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
  double next();

 private:
  Xoshiro256pp rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                            std::uint64_t seed);

}  // namespace cans
