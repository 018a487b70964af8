#include "wbcrlb/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wbcrlb/interp.hpp"

namespace wbcrlb {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// Ascending-coefficient polynomial helpers for the derivative recurrence
// P_{m+1} = P_m' + g'(u) P_m with linear g'(u) = g0 + g1 u.
std::vector<cplx> next_poly(const std::vector<cplx>& p, cplx g0, cplx g1) {
  std::vector<cplx> out(p.size() + 1, cplx{});
  for (std::size_t i = 1; i < p.size(); ++i)
    out[i - 1] += static_cast<double>(i) * p[i];
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] += g0 * p[i];
    out[i + 1] += g1 * p[i];
  }
  return out;
}

cplx eval_poly(const std::vector<cplx>& p, double u) {
  cplx acc{};
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
  return acc;
}

// Iterative radix-2 FFT, in place; size must be a power of two.
void fft(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

}  // namespace

Waveform::Waveform(WaveformSpec spec) : spec_(std::move(spec)) {
  if (!(spec_.duration > 0.0)) throw error("waveform duration must be > 0");
  if (!(spec_.amplitude > 0.0)) throw error("waveform amplitude must be > 0");
  if (spec_.max_derivative_order < 0)
    throw error("max derivative order must be >= 0");
  switch (spec_.family) {
    case WaveformFamily::chirp:
    case WaveformFamily::gaussian_pulse:
      if (spec_.family == WaveformFamily::gaussian_pulse &&
          !(spec_.width > 0.0))
        throw error("gaussian width must be > 0");
      real_ = true;
      build_polynomials();
      break;
    case WaveformFamily::tone:
      real_ = false;
      break;
    case WaveformFamily::sampled: {
      if (spec_.samples.size() < 8)
        throw error("sampled waveform needs at least 8 samples");
      if (!(spec_.sample_step > 0.0))
        throw error("sampled waveform grid step must be > 0");
      const double span =
          spec_.sample_step * static_cast<double>(spec_.samples.size() - 1);
      if (std::abs(span - spec_.duration) > 1e-6 * spec_.duration)
        spec_.duration = span;
      real_ = std::all_of(spec_.samples.begin(), spec_.samples.end(),
                          [](const cplx& v) { return v.imag() == 0.0; });
      build_sampled_grids();
      break;
    }
  }
}

void Waveform::build_polynomials() {
  // Work in u = t/T so coefficients stay O((2 w_scaled)^m) instead of
  // blowing through double range for high orders in SI units.
  cplx g0, g1;
  if (spec_.family == WaveformFamily::chirp) {
    const double ws = kTwoPi * spec_.chirp_rate * spec_.duration * spec_.duration;
    g0 = cplx(0.0, 0.0);
    g1 = cplx(0.0, 2.0 * ws);  // d/du of j*ws*u^2
  } else {
    const double wsc = spec_.width / spec_.duration;
    g0 = cplx(0.5 / (wsc * wsc), 0.0);  // d/du of -(u-1/2)^2/(2 wsc^2)
    g1 = cplx(-1.0 / (wsc * wsc), 0.0);
  }
  polys_.assign(1, std::vector<cplx>{cplx(1.0, 0.0)});
  for (int m = 0; m < spec_.max_derivative_order; ++m)
    polys_.push_back(next_poly(polys_.back(), g0, g1));
}

void Waveform::build_sampled_grids() {
  const std::size_t n = spec_.samples.size();
  // Raised-cosine taper over 2% of each edge keeps the periodic extension
  // smooth before spectral differentiation.
  std::vector<cplx> tapered = spec_.samples;
  const std::size_t ramp = std::max<std::size_t>(2, n / 50);
  for (std::size_t i = 0; i < ramp; ++i) {
    const double w =
        0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / static_cast<double>(ramp));
    tapered[i] *= w;
    tapered[n - 1 - i] *= w;
  }
  std::size_t npad = 1;
  while (npad < 2 * n) npad <<= 1;
  std::vector<cplx> freq(npad, cplx{});
  std::copy(tapered.begin(), tapered.end(), freq.begin());
  fft(freq, false);

  grids_.assign(static_cast<std::size_t>(spec_.max_derivative_order) + 1, {});
  grids_[0] = spec_.samples;
  std::vector<cplx> work(npad);
  for (int m = 1; m <= spec_.max_derivative_order; ++m) {
    for (std::size_t k = 0; k < npad; ++k) {
      const double fk =
          (k <= npad / 2 ? static_cast<double>(k)
                         : static_cast<double>(k) - static_cast<double>(npad)) /
          (static_cast<double>(npad) * spec_.sample_step);
      cplx mult = std::pow(cplx(0.0, kTwoPi * fk), m);
      if (k == npad / 2 && m % 2 == 1) mult = cplx{};  // odd-order Nyquist bin
      work[k] = freq[k] * mult;
    }
    fft(work, true);
    grids_[static_cast<std::size_t>(m)].assign(work.begin(), work.begin() + n);
  }
}

cplx Waveform::sampled_value(double t, int order) const {
  const auto& grid = grids_[static_cast<std::size_t>(order)];
  return sinc_interpolate(grid, spec_.sample_step, t);
}

cplx Waveform::evaluate(double t) const {
  if (t < 0.0 || t > spec_.duration) return cplx{};
  return interior(t, 0);
}

cplx Waveform::derivative(double t, int order) const {
  if (order < 0) throw error("derivative order must be >= 0");
  if (order > spec_.max_derivative_order)
    throw order_error("derivative order " + std::to_string(order) +
                      " exceeds configured maximum " +
                      std::to_string(spec_.max_derivative_order));
  if (order == 0) return evaluate(t);
  return interior(t, order);
}

cplx Waveform::interior(double t, int order) const {
  if (order > spec_.max_derivative_order)
    throw order_error("derivative order " + std::to_string(order) +
                      " exceeds configured maximum " +
                      std::to_string(spec_.max_derivative_order));
  const double T = spec_.duration;
  const double u = t / T;
  switch (spec_.family) {
    case WaveformFamily::chirp: {
      const double ws = kTwoPi * spec_.chirp_rate * T * T;
      const cplx rot(std::cos(ws * u * u), std::sin(ws * u * u));
      const cplx val = eval_poly(polys_[static_cast<std::size_t>(order)], u) * rot;
      return cplx(spec_.amplitude * val.real() / std::pow(T, order), 0.0);
    }
    case WaveformFamily::tone: {
      const cplx jw(0.0, kTwoPi * spec_.carrier);
      const double ph = kTwoPi * spec_.carrier * t;
      return spec_.amplitude * std::pow(jw, order) *
             cplx(std::cos(ph), std::sin(ph));
    }
    case WaveformFamily::gaussian_pulse: {
      const double wsc = spec_.width / T;
      const double z = (u - 0.5) / wsc;
      const double env = std::exp(-0.5 * z * z);
      const cplx val = eval_poly(polys_[static_cast<std::size_t>(order)], u);
      return cplx(spec_.amplitude * val.real() * env / std::pow(T, order), 0.0);
    }
    case WaveformFamily::sampled:
      return spec_.amplitude * sampled_value(t, order);
  }
  return cplx{};
}

WaveformSpec load_sampled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open sampled waveform file: " + path);
  std::vector<double> times;
  std::vector<cplx> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t, re, im;
    if (!(row >> t >> re >> im)) {
      if (times.empty()) continue;  // header line
      throw error("malformed sampled waveform row: " + line);
    }
    times.push_back(t);
    values.emplace_back(re, im);
  }
  if (times.size() < 8)
    throw error("sampled waveform needs at least 8 samples: " + path);
  const double step = times[1] - times[0];
  if (!(step > 0.0)) throw error("sampled waveform grid step must be > 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - step) > 1e-6 * step)
      throw error("sampled waveform grid is not uniform near row " +
                  std::to_string(i));
  }
  WaveformSpec spec;
  spec.family = WaveformFamily::sampled;
  spec.samples = std::move(values);
  spec.sample_step = step;
  spec.duration = step * static_cast<double>(times.size() - 1);
  return spec;
}

}  // namespace wbcrlb
