#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wbcrlb/fisher.hpp"
#include "wbcrlb/scene.hpp"
#include "wbcrlb/types.hpp"
#include "wbcrlb/waveform.hpp"

namespace wbcrlb {

// Band-limited view of a sampled echo: windowed-sinc reconstruction between
// samples, zero outside the record.
class EchoInterpolator {
 public:
  EchoInterpolator(Eigen::VectorXcd samples, double step);
  cplx operator()(double t) const;
  // raw sample access, zero outside the record
  cplx sample(long long n) const {
    if (n < 0 || n >= static_cast<long long>(samples_.size())) return cplx{};
    return samples_[static_cast<std::size_t>(n)];
  }
  double step() const { return step_; }
  int size() const { return static_cast<int>(samples_.size()); }

 private:
  std::vector<cplx> samples_;
  double step_;
};

// Wideband ambiguity value sqrt(gamma) * integral s_r(t) conj(s(gamma*(t - tau))) dt,
// quadrature at the sample spacing over the reference support.
cplx wbaf(const EchoInterpolator& received, const Waveform& reference,
          double tau, double gamma);

// Same correlation against the multi-scatterer template
// sum_p x_p s(gamma*(t - tau - p*spacing)); the oracle's reference.
cplx wbaf_composite(const EchoInterpolator& received, const Waveform& reference,
                    const Eigen::VectorXcd& x, double spacing, double tau,
                    double gamma);

enum class Method { oracle_mf, wbaf };

const char* method_name(Method m);

struct SearchBox {
  double tau_center = 0.0;
  double gamma_center = 1.0;
};

struct EstimatorConfig {
  int tau_cells = 20;        // coarse box: +- tau_cells * delta around center
  int tau_substeps = 4;      // coarse tau step = delta / tau_substeps
  int gamma_points = 201;    // coarse gamma grid size
  double gamma_half = 0.03;  // gamma box: center * (1 +- gamma_half)
  double tau_tol_divisor = 100.0;  // refine until bracket < delta/100
  double gamma_tol = 1e-6;
  int max_sweeps = 60;
};

struct WbafSurface {
  std::vector<double> tau_grid;
  std::vector<double> gamma_grid;
  Eigen::MatrixXd magnitude;  // gamma rows x tau columns
  int argmax_gamma = 0;
  int argmax_tau = 0;
};

struct EstimateResult {
  double tau_hat = 0.0;
  double gamma_hat = 0.0;
  Method method = Method::wbaf;
  double peak = 0.0;        // |W| at the refined point
  double coarse_peak = 0.0; // |W| at the coarse argmax
  int sweeps = 0;
  bool boundary_hit = false;
};

// Coarse |W| surface over the search box; method decides the reference.
WbafSurface wbaf_surface(const EchoInterpolator& received, const Waveform& wf,
                         const TargetScene& scene, Method method,
                         const SearchBox& box, const EstimatorConfig& cfg = {});

// Coarse argmax plus coordinate-descent refinement with shrinking brackets.
EstimateResult estimate(Method method, const EchoInterpolator& received,
                        const Waveform& wf, const TargetScene& scene,
                        const SearchBox& box, const EstimatorConfig& cfg = {});

struct MonteCarloConfig {
  std::vector<double> snr_db;
  int trials = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<Method> methods = {Method::oracle_mf, Method::wbaf};
  EstimatorConfig estimator;
  QuadratureConfig quad;
};

struct MonteCarloRow {
  Method method = Method::wbaf;
  double snr_db = 0.0;
  int trials = 0;
  double mse_tau = 0.0;
  double mse_gamma = 0.0;
  double crlb_tau = 0.0;
  double crlb_gamma = 0.0;
  int boundary_hits = 0;
};

struct MonteCarloReport {
  std::vector<MonteCarloRow> rows;
  std::uint64_t seed = 0;
};

// Per SNR: synthesizes `trials` echoes on independent noise streams
// (stream = trial index), runs every method, and reports MSEs next to the
// integral-representation CRLBs. Deterministic for fixed config+seed,
// regardless of thread count.
MonteCarloReport monte_carlo(const TargetScene& scene, const Waveform& wf,
                             const MonteCarloConfig& cfg);

}  // namespace wbcrlb
