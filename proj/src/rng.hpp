#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace relrank {

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// independent sequence, and generating block k costs the same wherever you
// start, so instance i of a batch can draw from stream i and a parallel
// run reproduces the serial one bit for bit.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      block_ = generate(counter_++);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform in [0,1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased draw from {0, ..., n-1} by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n < 2) return 0;
    std::uint64_t reject = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= reject) return r % n;
    }
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform();
    while (u == 0.0) u = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * 3.141592653589793238462643383279502884 * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::array<std::uint32_t, 4> generate(std::uint64_t index) const {
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    std::array<std::uint32_t, 4> x{
        static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    for (int round = 0;; ++round) {
      std::uint64_t p0 = std::uint64_t{kMul0} * x[0];
      std::uint64_t p1 = std::uint64_t{kMul1} * x[2];
      x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
           static_cast<std::uint32_t>(p0)};
      if (round == 9) break;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return x;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Purpose tags keeping nested experiment loops on disjoint streams.
namespace rng_purpose {
inline constexpr std::uint64_t kSubsample = 1;
inline constexpr std::uint64_t kRun = 2;
inline constexpr std::uint64_t kPartition = 3;
inline constexpr std::uint64_t kCloud = 4;
inline constexpr std::uint64_t kSelect = 5;
inline constexpr std::uint64_t kKMeans = 6;
inline constexpr std::uint64_t kDigit = 7;
}  // namespace rng_purpose

// Collision-free derived seed for an (purpose, index) slot under a root seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0) {
  Philox p(seed, (purpose << 48) ^ index);
  return p.next_u64();
}

}  // namespace relrank
