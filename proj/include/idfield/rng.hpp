#ifndef IDFIELD_RNG_HPP
#define IDFIELD_RNG_HPP

#include <array>
#include <cstdint>

namespace idfield {

// Counter-based random stream (Philox4x32-10). Identical (seed, stream)
// reproduce identical draws bit-for-bit on every platform, and distinct
// stream ids are independent, so replicas can be generated in parallel
// without shared state.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform();
  // Uniform on (0,1); never returns 0.
  double uniform_pos();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (second variate cached in the stream).
  double normal();

  // Poisson(mean) by chunked sequential search; exact for any finite mean,
  // cost O(mean) uniforms.
  std::int64_t poisson(double mean);

  // Derived independent stream, deterministic in (stream, k). Used to give
  // each model leaf / sub-task its own stream.
  RngStream child(std::uint64_t k) const;

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int index_ = 4;  // buffered outputs consumed
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// SplitMix64 finalizer; also used to derive child stream ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace idfield

#endif
