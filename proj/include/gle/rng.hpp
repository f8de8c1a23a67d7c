#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>

// Counter-based random streams (Philox4x32-10).  A stream is addressed by
// (seed, stream id) and produces a reproducible sequence independent of any
// other stream, so ensembles can be generated in any order or concurrently.

namespace gle::rng {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

struct Block {
  std::uint32_t w[4];
};

inline Block philox4x32(std::uint64_t counter, std::uint32_t k0, std::uint32_t k1) {
  std::uint32_t c0 = static_cast<std::uint32_t>(counter);
  std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
  std::uint32_t c2 = 0, c3 = 0;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return Block{{c0, c1, c2, c3}};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in (0, 1]: never returns 0, safe for log().
inline double u32_pair_to_unit(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t m = (static_cast<std::uint64_t>(a) << 21) ^ b;
  return (static_cast<double>(m & ((1ull << 53) - 1)) + 1.0) * 0x1p-53;
}

}  // namespace detail

// Roles keep draws for different purposes on disjoint streams even when they
// share a path index.
enum class Role : std::uint64_t {
  Wiener = 0,
  ForcingMode = 1,      // + mode index
  InvariantDraw = 1u << 20,
  CirculantDraw = (1u << 20) + 1,
  InvariantUniform = (1u << 20) + 2,
  Bootstrap = (1u << 20) + 3,
};

inline std::uint64_t stream_id(std::uint64_t path_index, Role role,
                               std::uint64_t mode = 0) {
  return detail::splitmix64(path_index * 0x100000001b3ull ^
                            (static_cast<std::uint64_t>(role) + mode) * 0x9E3779B97F4A7C15ull);
}

// Sequential stream of standard normal draws (Box-Muller; one Philox block
// yields two normals).  skip() supports bit-exact continuation of a stream
// that already consumed a known number of draws.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : counter_(0), index_(0), have_cached_(false), cached_(0.0) {
    const std::uint64_t k = detail::splitmix64(seed ^ detail::splitmix64(stream));
    key0_ = static_cast<std::uint32_t>(k);
    key1_ = static_cast<std::uint32_t>(k >> 32);
  }

  double next() {
    if (have_cached_) {
      have_cached_ = false;
      ++index_;
      return cached_;
    }
    const detail::Block b = detail::philox4x32(counter_++, key0_, key1_);
    const double u1 = detail::u32_pair_to_unit(b.w[0], b.w[1]);
    const double u2 = detail::u32_pair_to_unit(b.w[2], b.w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    ++index_;
    return r * std::cos(theta);
  }

  // Position the stream as if n draws had already been taken.
  void skip(std::uint64_t n) {
    counter_ = n / 2;
    have_cached_ = false;
    index_ = n;
    if (n % 2 != 0) {
      const detail::Block b = detail::philox4x32(counter_++, key0_, key1_);
      const double u1 = detail::u32_pair_to_unit(b.w[0], b.w[1]);
      const double u2 = detail::u32_pair_to_unit(b.w[2], b.w[3]);
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double theta = 6.283185307179586476925286766559 * u2;
      cached_ = r * std::sin(theta);
      have_cached_ = true;
    }
  }

  std::uint64_t draws_taken() const { return index_; }

 private:
  std::uint32_t key0_, key1_;
  std::uint64_t counter_;
  std::uint64_t index_;
  bool have_cached_;
  double cached_;
};

// Uniform draws in (0,1], on their own stream.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream) : counter_(0), phase_(0) {
    const std::uint64_t k = detail::splitmix64(seed ^ detail::splitmix64(stream));
    key0_ = static_cast<std::uint32_t>(k);
    key1_ = static_cast<std::uint32_t>(k >> 32);
  }

  double next() {
    if (phase_ == 0) {
      block_ = detail::philox4x32(counter_++, key0_, key1_);
      phase_ = 1;
      return detail::u32_pair_to_unit(block_.w[0], block_.w[1]);
    }
    phase_ = 0;
    return detail::u32_pair_to_unit(block_.w[2], block_.w[3]);
  }

 private:
  std::uint32_t key0_, key1_;
  std::uint64_t counter_;
  int phase_;
  detail::Block block_{};
};

}  // namespace gle::rng
