#pragma once

#include <cmath>
#include <cstdint>

#include "wbcrlb/types.hpp"

namespace wbcrlb {

// Philox4x32-10 counter-based generator. A (seed, stream, index) triple maps
// to random output with no sequential state, so Monte Carlo trials draw from
// independent streams and any sample can be regenerated in isolation.
class Philox {
 public:
  explicit Philox(std::uint64_t seed) : key_(seed) {}

  struct Block {
    std::uint32_t v[4];
  };

  Block block(std::uint64_t counter, std::uint64_t stream) const {
    std::uint32_t c0 = static_cast<std::uint32_t>(counter);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key_);
    std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = kMul0 * static_cast<std::uint64_t>(c0);
      const std::uint64_t p1 = kMul1 * static_cast<std::uint64_t>(c2);
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return Block{{c0, c1, c2, c3}};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint64_t key_;
};

// Unit-variance circular complex gaussians indexed by (stream, n), via
// Box-Muller on one Philox block. Real and imaginary parts each carry
// variance 1/2.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream)
      : philox_(seed), stream_(stream) {}

  cplx at(std::uint64_t n) const {
    const Philox::Block b = philox_.block(n, stream_);
    const std::uint64_t u =
        (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
    const std::uint64_t v =
        (static_cast<std::uint64_t>(b.v[2]) << 32) | b.v[3];
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
    const double u1 = ((u >> 11) + 1) * 0x1.0p-53;
    const double u2 = (v >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-std::log(u1));  // -2 ln u, scaled to var 1/2
    const double phi = 2.0 * kPi * u2;
    return cplx(r * std::cos(phi), r * std::sin(phi));
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  Philox philox_;
  std::uint64_t stream_;
};

}  // namespace wbcrlb
