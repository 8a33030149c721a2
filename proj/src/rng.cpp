#include "idfield/rng.hpp"

#include <cmath>

namespace idfield {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0,
                         std::uint32_t k1) {
  const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline std::array<std::uint32_t, 4> philox10(std::uint64_t stream,
                                             std::uint64_t block,
                                             std::uint64_t seed) {
  std::array<std::uint32_t, 4> ctr = {
      std::uint32_t(block), std::uint32_t(block >> 32), std::uint32_t(stream),
      std::uint32_t(stream >> 32)};
  std::uint32_t k0 = std::uint32_t(seed);
  std::uint32_t k1 = std::uint32_t(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, k0, k1);
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return ctr;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void RngStream::refill() {
  buf_ = philox10(stream_, block_, seed_);
  ++block_;
  index_ = 0;
}

std::uint32_t RngStream::next_u32() {
  if (index_ >= 4) refill();
  return buf_[index_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RngStream::uniform() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
  for (;;) {
    const double u = uniform();
    if (u > 0.0) return u;
  }
}

double RngStream::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

std::int64_t RngStream::poisson(double mean) {
  std::int64_t total = 0;
  // e^{-chunk} stays far from the subnormal range for chunk <= 256.
  while (mean > 0.0) {
    const double chunk = mean > 256.0 ? 256.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform_pos();
    while (prod > limit) {
      ++total;
      prod *= uniform_pos();
    }
  }
  return total;
}

RngStream RngStream::child(std::uint64_t k) const {
  return RngStream(seed_, mix64(stream_ ^ mix64(k + 1)));
}

}  // namespace idfield
