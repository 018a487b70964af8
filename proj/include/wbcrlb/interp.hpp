#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "wbcrlb/types.hpp"

namespace wbcrlb {

// Band-limited reconstruction of a uniform complex grid: windowed sinc,
// 64 taps (32 each side) under a Blackman-Harris window. The wide flat
// passband matters here: estimator objectives compare interpolated values
// across sub-sample shifts, and kernel gain ripple would masquerade as
// signal structure. Values outside the grid read as zero.
inline cplx sinc_interpolate(const std::vector<cplx>& values, double step,
                             double t) {
  constexpr int kHalf = 32;
  constexpr double kPi = 3.141592653589793238462643383279502884;
  const double pos = t / step;
  const long long n0 = static_cast<long long>(std::floor(pos));
  cplx acc{};
  for (int k = -kHalf + 1; k <= kHalf; ++k) {
    const long long idx = n0 + k;
    if (idx < 0 || idx >= static_cast<long long>(values.size())) continue;
    const double x = pos - static_cast<double>(idx);
    double w;
    if (std::abs(x) < 1e-12) {
      w = 1.0;
    } else {
      w = std::sin(kPi * x) / (kPi * x);
    }
    const double u = x / kHalf;
    w *= 0.35875 + 0.48829 * std::cos(kPi * u) +
         0.14128 * std::cos(2.0 * kPi * u) + 0.01168 * std::cos(3.0 * kPi * u);
    acc += values[static_cast<std::size_t>(idx)] * w;
  }
  return acc;
}

}  // namespace wbcrlb
