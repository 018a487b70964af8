#include "wbcrlb/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "wbcrlb/interp.hpp"

namespace wbcrlb {

EchoInterpolator::EchoInterpolator(Eigen::VectorXcd samples, double step)
    : samples_(samples.data(), samples.data() + samples.size()), step_(step) {
  if (!(step_ > 0.0)) throw error("echo interpolator: step must be > 0");
}

cplx EchoInterpolator::operator()(double t) const {
  return sinc_interpolate(samples_, step_, t);
}

namespace {

// One reference-support correlation over [tau, tau + T/gamma]. The nodes
// ride with the candidate (tau + k*step), so the candidate's window edges
// are handled identically everywhere; only the record's own signal edge
// ever falls mid-panel, and the sub-sample step keeps that residue well
// under the peak curvature. Richardson-corrected trapezoid in the body,
// Simpson over the fractional tail so the value moves smoothly in gamma.
cplx correlate_single(const EchoInterpolator& rx, const Waveform& wf,
                      double tau, double gamma, double step) {
  const double T = wf.duration();
  const int full = static_cast<int>(std::floor(T / (gamma * step)));
  int main_end = (full % 2 == 0) ? full : full - 1;
  cplx acc{};
  cplx f_main_end = rx(tau) * std::conj(wf.interior(0.0, 0));
  if (main_end >= 2) {
    cplx fine{}, coarse{};
    for (int k = 0; k <= main_end; ++k) {
      const double t = tau + k * step;
      const cplx f = rx(t) * std::conj(wf.interior(gamma * k * step, 0));
      fine += ((k == 0 || k == main_end) ? 0.5 : 1.0) * f;
      if (k % 2 == 0) coarse += ((k == 0 || k == main_end) ? 0.5 : 1.0) * f;
      if (k == main_end) f_main_end = f;
    }
    acc = (4.0 * (fine * step) - coarse * (2.0 * step)) / 3.0;
  } else {
    main_end = 0;
  }
  const double t_tail = tau + main_end * step;
  const double t_end = tau + T / gamma;
  const double w = t_end - t_tail;
  if (w > 1e-9 * step) {
    const double t_mid = 0.5 * (t_tail + t_end);
    const cplx f_mid =
        rx(t_mid) * std::conj(wf.interior(gamma * (t_mid - tau), 0));
    const cplx f_end = rx(t_end) * std::conj(wf.interior(T, 0));
    acc += w / 6.0 * (f_main_end + 4.0 * f_mid + f_end);
  }
  return acc;
}

}  // namespace

cplx wbaf(const EchoInterpolator& received, const Waveform& reference,
          double tau, double gamma) {
  if (!(gamma > 0.0)) throw error("wbaf: gamma must be > 0");
  return std::sqrt(gamma) * correlate_single(received, reference, tau, gamma,
                                             received.step() / 4.0);
}

cplx wbaf_composite(const EchoInterpolator& received, const Waveform& reference,
                    const Eigen::VectorXcd& x, double spacing, double tau,
                    double gamma) {
  if (!(gamma > 0.0)) throw error("wbaf: gamma must be > 0");
  cplx acc{};
  for (int p = 0; p < x.size(); ++p)
    acc += std::conj(x[p]) * correlate_single(received, reference,
                                              tau + p * spacing, gamma,
                                              received.step() / 4.0);
  return std::sqrt(gamma) * acc;
}

const char* method_name(Method m) {
  return m == Method::oracle_mf ? "oracle-mf" : "wbaf";
}

namespace {

// Search objective: the amplitude-normalized correlation of the raw sample
// vector against the sampled reference, |<y, r>| / ||r||. The continuum
// ambiguity carries sqrt(gamma) for exactly this reference-energy
// normalization; using the discrete norms keeps that exact on the sampled
// record, where a fixed normalization would leave the argmax chasing
// sampling and window-edge residue of the reference energy.
double objective(Method method, const EchoInterpolator& rx, const Waveform& wf,
                 const TargetScene& scene, double tau, double gamma) {
  const double T = wf.duration();
  const double delta = rx.step();
  const int p = (method == Method::oracle_mf) ? scene.scatterers() : 1;
  const Eigen::VectorXcd& x = scene.coefficients();
  const double support = T / gamma + (p - 1) * scene.delta();
  const long long n_lo = static_cast<long long>(std::floor(tau / delta));
  const long long n_hi =
      static_cast<long long>(std::ceil((tau + support) / delta));
  cplx corr{};
  double energy = 0.0;
  for (long long n = n_lo; n <= n_hi; ++n) {
    cplx ref{};
    for (int q = 0; q < p; ++q) {
      const double arg = gamma * (n * delta - tau - q * scene.delta());
      if (arg < 0.0 || arg > T) continue;
      ref += (method == Method::oracle_mf ? x[q] : cplx(1.0, 0.0)) *
             wf.interior(arg, 0);
    }
    if (ref == cplx{}) continue;
    corr += rx.sample(n) * std::conj(ref);
    energy += std::norm(ref);
  }
  if (energy <= 0.0) return 0.0;
  return std::abs(corr) / std::sqrt(energy);
}

// Golden-section maximization of f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

WbafSurface wbaf_surface(const EchoInterpolator& received, const Waveform& wf,
                         const TargetScene& scene, Method method,
                         const SearchBox& box, const EstimatorConfig& cfg) {
  const int sub = cfg.tau_substeps;
  const double delta = scene.delta();
  const double fine = delta / sub;
  const int half = cfg.tau_cells * sub;
  const int p = (method == Method::oracle_mf) ? scene.scatterers() : 1;
  const double T = wf.duration();
  // The lattice algebra below wants the box center on the sample grid;
  // snapping costs at most half a sample of box placement.
  const long long k0 =
      static_cast<long long>(std::llround(box.tau_center / delta));
  const double center = static_cast<double>(k0) * delta;

  WbafSurface surf;
  surf.tau_grid.resize(static_cast<std::size_t>(2 * half + 1));
  for (int j = -half; j <= half; ++j)
    surf.tau_grid[static_cast<std::size_t>(j + half)] = center + j * fine;
  surf.gamma_grid.resize(static_cast<std::size_t>(cfg.gamma_points));
  for (int i = 0; i < cfg.gamma_points; ++i) {
    const double frac = (cfg.gamma_points == 1)
                            ? 0.0
                            : -1.0 + 2.0 * i / (cfg.gamma_points - 1);
    surf.gamma_grid[static_cast<std::size_t>(i)] =
        box.gamma_center * (1.0 + cfg.gamma_half * frac);
  }

  surf.magnitude.resize(cfg.gamma_points, 2 * half + 1);
  std::vector<cplx> refc;
  std::vector<double> refe;
  for (int i = 0; i < cfg.gamma_points; ++i) {
    const double gamma = surf.gamma_grid[static_cast<std::size_t>(i)];
    // Reference (single or composite) on the sub-sample lattice:
    // refc[m] = sum_q x_q s(gamma*(m*fine - q*delta)), m*fine from 0 to the
    // composite support.
    const int m_max = static_cast<int>(
        std::ceil(sub * T / (gamma * delta))) + sub * (p - 1) + 1;
    refc.assign(static_cast<std::size_t>(m_max + 1), cplx{});
    for (int q = 0; q < p; ++q) {
      const cplx xq = (method == Method::oracle_mf)
                          ? scene.coefficients()[q]
                          : cplx(1.0, 0.0);
      const int m0 = sub * q;
      const int m1 = std::min<int>(
          m_max, m0 + static_cast<int>(std::floor(sub * T / (gamma * delta))));
      for (int m = m0; m <= m1; ++m)
        refc[static_cast<std::size_t>(m)] +=
            xq * wf.interior(gamma * (m - m0) * fine, 0);
    }
    refe.assign(refc.size(), 0.0);
    for (std::size_t m = 0; m < refc.size(); ++m) refe[m] = std::norm(refc[m]);

    // Samples n contribute through lattice index m = sub*(n - k0) - j.
    for (int j = -half; j <= half; ++j) {
      const long long n_lo = k0 + static_cast<long long>(
          std::ceil((static_cast<double>(j) - 0.5) / sub));
      const long long n_hi = k0 + static_cast<long long>(std::floor(
          (static_cast<double>(m_max + j)) / sub + 0.5));
      cplx corr{};
      double energy = 0.0;
      for (long long n = std::max<long long>(n_lo, 0); n <= n_hi; ++n) {
        const long long m = sub * (n - k0) - j;
        if (m < 0 || m > m_max) continue;
        corr += received.sample(n) * std::conj(refc[static_cast<std::size_t>(m)]);
        energy += refe[static_cast<std::size_t>(m)];
      }
      surf.magnitude(i, j + half) =
          (energy > 0.0) ? std::abs(corr) / std::sqrt(energy) : 0.0;
    }
  }
  surf.magnitude.maxCoeff(&surf.argmax_gamma, &surf.argmax_tau);
  return surf;
}

EstimateResult estimate(Method method, const EchoInterpolator& received,
                        const Waveform& wf, const TargetScene& scene,
                        const SearchBox& box, const EstimatorConfig& cfg) {
  const WbafSurface surf =
      wbaf_surface(received, wf, scene, method, box, cfg);
  double tau = surf.tau_grid[static_cast<std::size_t>(surf.argmax_tau)];
  double gamma = surf.gamma_grid[static_cast<std::size_t>(surf.argmax_gamma)];

  const double fine = scene.delta() / cfg.tau_substeps;
  const double gamma_step = (cfg.gamma_points > 1)
                                ? 2.0 * cfg.gamma_half * box.gamma_center /
                                      (cfg.gamma_points - 1)
                                : cfg.gamma_half * box.gamma_center;
  double tau_bracket = 2.0 * fine;
  double gamma_bracket = 2.0 * gamma_step;
  const double tau_tol = scene.delta() / cfg.tau_tol_divisor;

  const auto f = [&](double t, double g) {
    return objective(method, received, wf, scene, t, g);
  };
  int sweeps = 0;
  while ((tau_bracket > tau_tol || gamma_bracket > cfg.gamma_tol) &&
         sweeps < cfg.max_sweeps) {
    const double tau_before = tau;
    const double gamma_before = gamma;
    tau = golden_max([&](double t) { return f(t, gamma); }, tau - tau_bracket,
                     tau + tau_bracket, std::max(tau_tol * 0.25, tau_bracket * 1e-3));
    gamma = golden_max([&](double g) { return f(tau, g); },
                       gamma - gamma_bracket, gamma + gamma_bracket,
                       std::max(cfg.gamma_tol * 0.25, gamma_bracket * 1e-3));
    // Only close in once the sweep stops covering ground; the
    // delay/stretch ridge is walked in many small coordinate steps.
    if (std::abs(tau - tau_before) < 0.5 * tau_bracket &&
        std::abs(gamma - gamma_before) < 0.5 * gamma_bracket) {
      tau_bracket *= 0.5;
      gamma_bracket *= 0.5;
    }
    ++sweeps;
  }

  EstimateResult out;
  out.method = method;
  out.tau_hat = tau;
  out.gamma_hat = gamma;
  out.coarse_peak = surf.magnitude(surf.argmax_gamma, surf.argmax_tau);
  out.peak = f(tau, gamma);
  if (out.peak < out.coarse_peak) {
    // Refinement must never lose against the coarse grid.
    out.tau_hat = surf.tau_grid[static_cast<std::size_t>(surf.argmax_tau)];
    out.gamma_hat = surf.gamma_grid[static_cast<std::size_t>(surf.argmax_gamma)];
    out.peak = out.coarse_peak;
  }
  out.sweeps = sweeps;
  const double tau_lo = surf.tau_grid.front();
  const double tau_hi = surf.tau_grid.back();
  const double g_lo = surf.gamma_grid.front();
  const double g_hi = surf.gamma_grid.back();
  out.boundary_hit = out.tau_hat <= tau_lo + fine || out.tau_hat >= tau_hi - fine ||
                     out.gamma_hat <= g_lo + gamma_step ||
                     out.gamma_hat >= g_hi - gamma_step;
  return out;
}

MonteCarloReport monte_carlo(const TargetScene& scene, const Waveform& wf,
                             const MonteCarloConfig& cfg) {
  if (cfg.trials < 1) throw error("monte_carlo: trials must be >= 1");
  MonteCarloReport report;
  report.seed = cfg.seed;
  const SearchBox box{scene.tau(), scene.gamma()};

  for (double snr : cfg.snr_db) {
    const double n0 = n0_for_snr(scene, wf, snr, cfg.quad);
    const CrlbResult bound = crlb(fisher_blocks(scene, wf, n0, cfg.quad));

    struct TrialErr {
      double tau2 = 0.0, gamma2 = 0.0;
      bool boundary = false;
    };
    std::vector<std::vector<TrialErr>> errs(
        cfg.methods.size(), std::vector<TrialErr>(cfg.trials));

    std::atomic<int> next{0};
    const int workers =
        std::max(1, std::min(cfg.threads, cfg.trials));
    const auto worker = [&]() {
      for (;;) {
        const int trial = next.fetch_add(1);
        if (trial >= cfg.trials) break;
        const NoiseModel noise{n0, cfg.seed};
        const Eigen::VectorXcd echo = synthesize_echo(
            scene, wf, noise, static_cast<std::uint64_t>(trial));
        const EchoInterpolator rx(echo, scene.delta());
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
          const EstimateResult est =
              estimate(cfg.methods[m], rx, wf, scene, box, cfg.estimator);
          TrialErr& slot = errs[m][static_cast<std::size_t>(trial)];
          const double dt = est.tau_hat - scene.tau();
          const double dg = est.gamma_hat - scene.gamma();
          slot.tau2 = dt * dt;
          slot.gamma2 = dg * dg;
          slot.boundary = est.boundary_hit;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      MonteCarloRow row;
      row.method = cfg.methods[m];
      row.snr_db = snr;
      row.trials = cfg.trials;
      row.crlb_tau = bound.crlb_tau;
      row.crlb_gamma = bound.crlb_gamma;
      for (const TrialErr& e : errs[m]) {
        row.mse_tau += e.tau2;
        row.mse_gamma += e.gamma2;
        row.boundary_hits += e.boundary ? 1 : 0;
      }
      row.mse_tau /= cfg.trials;
      row.mse_gamma /= cfg.trials;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace wbcrlb
