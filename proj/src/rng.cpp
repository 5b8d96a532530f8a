#include "cans/rng.hpp"

#include <cmath>

namespace cans {

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  SplitMix64 sm{seed};
  for (auto& s : s_) s = sm.next();
}

std::uint64_t Xoshiro256pp::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256pp::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = rng_.uniform();
  const double u2 = rng_.uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));  // ln(1-u1), u1 < 1
  const double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle);
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                            std::uint64_t seed) {
  DenseMatrix a(rows, cols);
  GaussianStream g(seed);
  const std::size_t total = rows * cols;
  for (std::size_t i = 0; i < total; ++i) a.data()[i] = g.next();
  return a;
}

}  // namespace cans
