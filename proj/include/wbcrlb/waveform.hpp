#pragma once

#include <string>
#include <vector>

#include "wbcrlb/types.hpp"

namespace wbcrlb {

enum class WaveformFamily { chirp, tone, gaussian_pulse, sampled };

// Complex-envelope description. The envelope is time-limited to [0, T];
// inside the window the families are
//   chirp          amplitude * cos(2*pi*rate*t^2)
//   tone           amplitude * exp(j*2*pi*carrier*t)
//   gaussian_pulse amplitude * exp(-(t - T/2)^2 / (2*width^2))
//   sampled        uniform grid of complex values, step sample_step
struct WaveformSpec {
  WaveformFamily family = WaveformFamily::chirp;
  double amplitude = 1.0;
  double duration = 0.0;        // T, seconds
  double chirp_rate = 0.0;      // Hz/s
  double carrier = 0.0;         // Hz
  double width = 0.0;           // gaussian std deviation, seconds
  std::vector<cplx> samples;    // sampled family only
  double sample_step = 0.0;     // seconds
  int max_derivative_order = 18;  // 2*K_max + 2 with K_max = 8
};

// Validated waveform with derivative evaluation. Derivatives use the
// interior analytic expression on the open window; the rectangular cut at
// 0 and T is never represented as an impulse. All methods are const and
// the object is safe to share across threads.
class Waveform {
 public:
  explicit Waveform(WaveformSpec spec);

  // Windowed envelope: exactly 0 outside [0, T].
  cplx evaluate(double t) const;

  // order-th derivative of the interior expression; throws order_error
  // beyond the configured maximum. order 0 gives the windowed value.
  cplx derivative(double t, int order) const;

  // Interior analytic expression without the window, any t. Used by the
  // quadratures and the finite-difference machinery, which manage the
  // window themselves. For the sampled family this falls to 0 outside the
  // grid (no analytic continuation exists).
  cplx interior(double t, int order) const;

  double duration() const { return spec_.duration; }
  double amplitude() const { return spec_.amplitude; }
  int max_order() const { return spec_.max_derivative_order; }
  bool is_real() const { return real_; }
  const WaveformSpec& spec() const { return spec_; }

  // Sampled envelopes are only as smooth as their reconstruction kernel;
  // quadrature convergence checks against them cannot demand more.
  double quadrature_floor() const {
    return spec_.family == WaveformFamily::sampled ? 1e-6 : 0.0;
  }

 private:
  void build_polynomials();
  void build_sampled_grids();
  cplx sampled_value(double t, int order) const;

  WaveformSpec spec_;
  bool real_ = false;
  // chirp / gaussian: coefficient table, polys_[m] is P_m in u = t/T with
  //   s^(m)(t) = amplitude / T^m * {Re}(P_m(u) * exp(g(u)))
  std::vector<std::vector<cplx>> polys_;
  // sampled: spectral-derivative grids per order
  std::vector<std::vector<cplx>> grids_;
};

// Loads a sampled waveform from a CSV of rows "t,re,im".
WaveformSpec load_sampled_csv(const std::string& path);

}  // namespace wbcrlb
