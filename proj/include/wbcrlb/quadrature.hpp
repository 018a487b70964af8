#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>

#include "wbcrlb/types.hpp"

namespace wbcrlb {

// Composite trapezoid on a uniform grid with one Richardson refinement.
// Three nested grids (h, 2h, 4h) come out of a single pass over the fine
// nodes; the two Richardson values they yield are compared to decide
// convergence, and the finer one is returned.
struct QuadratureConfig {
  int intervals = 1 << 14;   // fine-grid interval count (forced to mult. of 4)
  double rel_tol = 1e-8;     // allowed |R_h - R_2h| relative to scale
  bool check = true;         // throw quadrature_error on disagreement
};

namespace detail {
inline double mag(double v) { return std::abs(v); }
inline double mag(const cplx& v) { return std::abs(v); }
}  // namespace detail

// Integrates f over [a, b]. f may return double or cplx; endpoints are
// evaluated directly, so integrands built on interior expressions must be
// valued on the closed interval.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  using R = std::decay_t<decltype(f(a))>;
  if (!(b > a)) return R{};
  int n = cfg.intervals < 4 ? 4 : cfg.intervals;
  n += (4 - n % 4) % 4;
  const double h = (b - a) / n;

  R s1{};  // fine trapezoid sum
  R s2{};  // every other node
  R s4{};  // every fourth node
  double l1 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = (i == n) ? b : a + i * h;
    const R v = f(t);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s1 += w * v;
    if (i % 2 == 0) s2 += ((i == 0 || i == n) ? 0.5 : 1.0) * v;
    if (i % 4 == 0) s4 += ((i == 0 || i == n) ? 0.5 : 1.0) * v;
    l1 += w * detail::mag(v);
  }
  const R rich_fine = (4.0 * (s1 * h) - s2 * (2.0 * h)) / 3.0;
  const R rich_coarse = (4.0 * (s2 * (2.0 * h)) - s4 * (4.0 * h)) / 3.0;
  if (cfg.check) {
    const double disagree = detail::mag(rich_fine - rich_coarse);
    const double scale = detail::mag(rich_fine) + 1e-3 * l1 * h + 1e-300;
    if (disagree > cfg.rel_tol * scale) {
      throw quadrature_error("quadrature did not converge: refinement moved " +
                             std::to_string(disagree) + " against scale " +
                             std::to_string(scale));
    }
  }
  return rich_fine;
}

}  // namespace wbcrlb
