#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>

#include "wbcrlb/moments.hpp"
#include "wbcrlb/waveform.hpp"

using namespace wbcrlb;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

WaveformSpec ref_chirp(double rate = 2.56e9, double duration = 5e-5,
                       double amplitude = 1.0) {
  WaveformSpec s;
  s.family = WaveformFamily::chirp;
  s.chirp_rate = rate;
  s.duration = duration;
  s.amplitude = amplitude;
  return s;
}

WaveformSpec ref_tone(double carrier = 1e5, double duration = 5e-5) {
  WaveformSpec s;
  s.family = WaveformFamily::tone;
  s.carrier = carrier;
  s.duration = duration;
  return s;
}

WaveformSpec ref_gauss(double duration = 5e-5, double width_frac = 1.0 / 12.0) {
  WaveformSpec s;
  s.family = WaveformFamily::gaussian_pulse;
  s.duration = duration;
  s.width = duration * width_frac;
  return s;
}

}  // namespace

TEST_CASE("windowed evaluation") {
  Waveform chirp(ref_chirp());
  CHECK(chirp.evaluate(-1e-6) == cplx{});
  CHECK(chirp.evaluate(5.1e-5) == cplx{});
  CHECK(chirp.evaluate(0.0).real() == doctest::Approx(1.0));  // cos(0)
  const double t = 1.7e-5;
  CHECK(chirp.evaluate(t).real() ==
        doctest::Approx(std::cos(2 * kPi * 2.56e9 * t * t)).epsilon(1e-12));
  CHECK(chirp.evaluate(t).imag() == 0.0);

  Waveform tone(ref_tone());
  for (double tt : {1e-6, 2.3e-5, 4.9e-5})
    CHECK(std::abs(tone.evaluate(tt)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("analytic derivatives match the chain rule") {
  Waveform chirp(ref_chirp());
  const double a = 2.56e9;
  for (double t : {3e-6, 1.1e-5, 4.2e-5}) {
    const double expected = -4 * kPi * a * t * std::sin(2 * kPi * a * t * t);
    CHECK(chirp.derivative(t, 1).real() ==
          doctest::Approx(expected).epsilon(1e-10));
  }
  Waveform tone(ref_tone());
  const double t = 2e-5;
  const cplx expected = cplx(0.0, 2 * kPi * 1e5) * tone.evaluate(t);
  CHECK(std::abs(tone.derivative(t, 1) - expected) <=
        1e-12 * std::abs(expected));
  // order 0 is the windowed value
  CHECK(chirp.derivative(1e-5, 0) == chirp.evaluate(1e-5));
  CHECK(chirp.derivative(-1.0, 0) == cplx{});
}

TEST_CASE("high orders agree with central differences of the next order down") {
  for (const WaveformSpec& spec : {ref_chirp(), ref_gauss()}) {
    Waveform wf(spec);
    const double h = spec.duration * 1e-6;
    // points chosen away from symmetric derivative zeros
    for (int m = 1; m <= 5; ++m) {
      for (double t : {1.5e-5, 2.3e-5, 3.6e-5}) {
        const cplx fd =
            (wf.interior(t + h, m - 1) - wf.interior(t - h, m - 1)) / (2 * h);
        const cplx an = wf.interior(t, m);
        const double scale = std::abs(an) + std::abs(fd) + 1e-30;
        CHECK(std::abs(fd - an) / scale <= 1e-5);
      }
    }
  }
}

TEST_CASE("derivative order limit") {
  WaveformSpec spec = ref_chirp();
  spec.max_derivative_order = 6;
  Waveform wf(spec);
  CHECK_NOTHROW(wf.derivative(1e-5, 6));
  CHECK_THROWS_AS(wf.derivative(1e-5, 7), order_error);
}

TEST_CASE("sampled family reproduces the analytic chirp inside the window") {
  Waveform chirp(ref_chirp());
  WaveformSpec spec;
  spec.family = WaveformFamily::sampled;
  spec.sample_step = 5e-5 / 4096;
  for (int n = 0; n <= 4096; ++n)
    spec.samples.push_back(chirp.evaluate(n * spec.sample_step));
  spec.duration = 5e-5;
  Waveform sampled(spec);
  for (double t : {1.2e-5, 2.5e-5, 3.7e-5}) {
    CHECK(std::abs(sampled.evaluate(t) - chirp.evaluate(t)) <= 2e-4);
    CHECK(std::abs(sampled.derivative(t, 1) - chirp.derivative(t, 1)) <=
          2e-3 * std::abs(chirp.derivative(t, 1)) + 1.0);
  }
}

TEST_CASE("sampled family validation") {
  WaveformSpec spec;
  spec.family = WaveformFamily::sampled;
  spec.sample_step = 1e-6;
  spec.duration = 4e-6;
  spec.samples = {cplx(1, 0), cplx(1, 0), cplx(1, 0), cplx(1, 0)};
  CHECK_THROWS_AS(Waveform{spec}, error);  // fewer than 8 samples
}

TEST_CASE("sampled csv loader") {
  const auto path = std::filesystem::temp_directory_path() / "wbcrlb_wave.csv";
  {
    std::ofstream out(path);
    out << "t,re,im\n";
    for (int n = 0; n < 16; ++n)
      out << n * 1e-6 << "," << 0.5 * n << "," << -0.25 * n << "\n";
  }
  const WaveformSpec spec = load_sampled_csv(path.string());
  CHECK(spec.family == WaveformFamily::sampled);
  CHECK(spec.samples.size() == 16);
  CHECK(spec.sample_step == doctest::Approx(1e-6));
  CHECK(spec.samples[3] == cplx(1.5, -0.75));
  std::filesystem::remove(path);
}

TEST_CASE("moment examples") {
  Waveform tone(ref_tone(1e5, 5e-5));
  const MomentTable tab = moments(tone, 1);
  CHECK(tab.m(0, 0) == doctest::Approx(5e-5).epsilon(1e-10));  // |s|^2 = 1

  Waveform chirp(ref_chirp());
  const MomentTable ctab = moments(chirp, 3);
  for (int i = 0; i <= 2; ++i)
    for (int k = 0; k <= 3; ++k)
      CHECK(std::abs(ctab.mt(i, k)) <=
            1e-12 * (std::abs(ctab.m(i, k)) + 1.0));  // real waveform
}

TEST_CASE("moment invariants: positivity and Cauchy-Schwarz") {
  for (const WaveformSpec& spec : {ref_chirp(), ref_tone(), ref_gauss()}) {
    Waveform wf(spec);
    const MomentTable tab = moments(wf, 3);
    for (int k = 0; k <= 3; ++k) {
      CHECK(tab.m(0, k) >= 0.0);
      CHECK(tab.m(2, k) >= 0.0);
      CHECK(tab.m(1, k) * tab.m(1, k) <=
            tab.m(0, k) * tab.m(2, k) * (1 + 1e-12));
    }
  }
}

TEST_CASE("amplitude scaling moves energy only") {
  Waveform base(ref_chirp(2.56e9, 5e-5, 1.0));
  Waveform scaled(ref_chirp(2.56e9, 5e-5, 3.0));
  const MomentTable m1 = moments(base, 2);
  const MomentTable m9 = moments(scaled, 2);
  for (int i = 0; i <= 2; ++i)
    for (int k = 0; k <= 2; ++k)
      CHECK(m9.m(i, k) == doctest::Approx(9.0 * m1.m(i, k)).epsilon(1e-12));
  const EffectiveParams e1 = effective_params(base);
  const EffectiveParams e9 = effective_params(scaled);
  CHECK(e9.rms_bandwidth == doctest::Approx(e1.rms_bandwidth).epsilon(1e-12));
  CHECK(e9.effective_duration ==
        doctest::Approx(e1.effective_duration).epsilon(1e-12));
  CHECK(e9.energy == doctest::Approx(9.0 * e1.energy).epsilon(1e-12));
}

TEST_CASE("starved quadrature is reported, not returned") {
  Waveform wf(ref_chirp());
  QuadratureConfig starved;
  starved.intervals = 64;  // nowhere near resolving the oscillation
  CHECK_THROWS_AS(moments(wf, 3, starved), quadrature_error);
}

TEST_CASE("quadrature convergence for the gaussian family") {
  Waveform wf(ref_gauss());
  QuadratureConfig coarse;
  coarse.intervals = 1 << 14;
  QuadratureConfig fine;
  fine.intervals = 1 << 15;
  const MomentTable a = moments(wf, 3, coarse);
  const MomentTable b = moments(wf, 3, fine);
  for (int i = 0; i <= 2; ++i)
    for (int k = 0; k <= 3; ++k) {
      const double scale = std::abs(b.m(i, k)) + 1e-300;
      CHECK(std::abs(a.m(i, k) - b.m(i, k)) / scale <= 1e-8);
    }
}

TEST_CASE("effective parameters: analytic tone values") {
  const double fc = 1e5, T = 5e-5;
  Waveform tone(ref_tone(fc, T));
  const EffectiveParams eff = effective_params(tone);
  // The moment-ratio convention carries the derivative's 2*pi.
  CHECK(std::abs(eff.rms_bandwidth - 2 * kPi * fc) <= 1e-6 * 2 * kPi * fc);
  CHECK(std::abs(eff.effective_duration - T / std::sqrt(3.0)) <=
        1e-6 * T / std::sqrt(3.0));
  CHECK(std::abs(eff.duration_t2 - T / std::sqrt(3.0)) <=
        1e-6 * T / std::sqrt(3.0));
}

TEST_CASE("effective parameters: published chirp values") {
  {
    Waveform wf(ref_chirp(2.56e9, 5e-5));
    const EffectiveParams eff = effective_params(wf);
    CHECK(std::abs(eff.rms_bandwidth - 9.0884e5) <= 1e-3 * 9.0884e5);
    CHECK(std::abs(eff.effective_duration - 3.893e-5) <= 5e-3 * 3.893e-5);
    CHECK(std::abs(eff.time_bandwidth - 35.3786) <= 5e-3 * 35.3786);
  }
  {
    Waveform wf(ref_chirp(0.256e9, 5e-5));
    const EffectiveParams eff = effective_params(wf);
    CHECK(std::abs(eff.rms_bandwidth - 0.7604e5) <= 1e-3 * 0.7604e5);
    CHECK(std::abs(eff.effective_duration - 3.549e-5) <= 5e-3 * 3.549e-5);
    CHECK(std::abs(eff.time_bandwidth - 2.6988) <= 5e-3 * 2.6988);
  }
  {
    // Self-similar family: fixed rate*T^2 keeps the product fixed.
    Waveform wf(ref_chirp(6.4 / (1.5e-5 * 1.5e-5), 1.5e-5));
    const EffectiveParams eff = effective_params(wf);
    CHECK(std::abs(eff.effective_duration - 1.1678e-5) <= 5e-3 * 1.1678e-5);
    CHECK(std::abs(eff.time_bandwidth - 35.3786) <= 5e-3 * 35.3786);
  }
}

TEST_CASE("degenerate waveform is rejected") {
  WaveformSpec spec;
  spec.family = WaveformFamily::sampled;
  spec.sample_step = 1e-6;
  spec.duration = 15e-6;
  spec.samples.assign(16, cplx{});
  Waveform wf(spec);
  CHECK_THROWS_AS(effective_params(wf), degenerate_error);
}

TEST_CASE("identity examples") {
  Waveform gauss(ref_gauss());
  {
    const IdentityCheck c =
        check_identity(gauss, MomentIdentity::re_plain, 1, 1);
    const MomentTable tab = moments(gauss, 1);
    CHECK(c.rhs == doctest::Approx(tab.m(0, 1)).epsilon(1e-12));
    CHECK(c.rel_error <= 1e-9);
  }
  {
    const IdentityCheck c =
        check_identity(gauss, MomentIdentity::re_plain, 0, 1);
    CHECK(c.rhs == 0.0);  // odd p+q
    CHECK(c.rel_error <= 1e-9);
  }
  {
    const IdentityCheck c = check_identity(gauss, MomentIdentity::re_t, 1, 2);
    CHECK(c.rel_error <= 1e-6);
  }
  CHECK_THROWS_AS(check_identity(gauss, MomentIdentity::re_t2, 1, 2), error);
}

TEST_CASE("identity suite: smooth waveform, all orders to p+q = 6") {
  Waveform gauss(ref_gauss());
  for (int p = 0; p <= 6; ++p) {
    for (int q = 0; p + q <= 6; ++q) {
      for (MomentIdentity id : {MomentIdentity::re_plain, MomentIdentity::re_t,
                                MomentIdentity::im_plain, MomentIdentity::im_t}) {
        const IdentityCheck c = check_identity(gauss, id, p, q);
        INFO("identity ", static_cast<int>(id), " p=", p, " q=", q);
        CHECK(c.rel_error <= 1e-6);
      }
      if (p == 0) {
        for (MomentIdentity id :
             {MomentIdentity::re_t2, MomentIdentity::im_t2}) {
          const IdentityCheck c = check_identity(gauss, id, 0, q);
          INFO("t2 identity ", static_cast<int>(id), " q=", q);
          CHECK(c.rel_error <= 1e-6);
        }
      }
    }
  }
}
