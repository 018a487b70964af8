#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "wbcrlb/quadrature.hpp"
#include "wbcrlb/types.hpp"
#include "wbcrlb/waveform.hpp"

namespace wbcrlb {

struct SceneParams {
  double tau = 0.0;     // first-scatterer delay, s
  double gamma = 1.0;   // Doppler stretch (c-v)/(c+v)
  double delta = 0.0;   // sampling interval = scatterer spacing, s
  int scatterers = 1;   // P
  Eigen::VectorXcd coefficients;  // x, length P (defaults to all ones)
  double propagation_speed = 3e8;
};

// Validated extended-target geometry plus the sample count. tau is rounded
// to the nearest multiple of delta (the sampled model needs tau/delta
// integral); the applied adjustment is kept for reporting. N defaults to
// the smallest count that fully covers the echo plus a 5% guard band.
class TargetScene {
 public:
  static TargetScene create(const SceneParams& params, const Waveform& wf,
                            std::optional<int> sample_count = std::nullopt);

  double tau() const { return tau_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  int scatterers() const { return p_; }
  int sample_count() const { return n_; }
  const Eigen::VectorXcd& coefficients() const { return x_; }
  double propagation_speed() const { return c_; }
  double tau_adjustment() const { return tau_adjustment_; }
  // c*(tau_P - tau_1)/2, derived, never stored independently
  double target_size() const { return 0.5 * c_ * delta_ * (p_ - 1); }
  bool real_coefficients() const;

 private:
  TargetScene() = default;
  double tau_ = 0.0, gamma_ = 1.0, delta_ = 0.0, c_ = 3e8;
  double tau_adjustment_ = 0.0;
  int p_ = 1, n_ = 0;
  Eigen::VectorXcd x_;
};

struct NoiseModel {
  double n0 = 0.0;        // noise power spectral density; sigma^2 = n0/delta
  std::uint64_t seed = 0;
};

std::vector<double> scatterer_delays(const TargetScene& scene);

// Phi(n, p) = s(gamma * (n*delta - tau_p)), windowed evaluation.
Eigen::MatrixXcd measurement_matrix(const TargetScene& scene,
                                    const Waveform& wf);

// Gram matrix Lambda(i, j) = integral conj(s(t)) s(t + gamma*(tau_i - tau_j)) dt,
// Hermitian with energy on the diagonal.
Eigen::MatrixXcd gram_matrix(const TargetScene& scene, const Waveform& wf,
                             const QuadratureConfig& quad = {});

// y = Phi x + w with w circular complex gaussian, variance n0/delta per
// sample. Deterministic in (seed, stream); one stream per Monte Carlo trial.
Eigen::VectorXcd synthesize_echo(const TargetScene& scene, const Waveform& wf,
                                 const NoiseModel& noise,
                                 std::uint64_t stream = 0);

// SNR = x^H Lambda x / (gamma * n0), reported in dB, and its inverse.
double snr_db(const TargetScene& scene, const Waveform& wf, double n0,
              const QuadratureConfig& quad = {});
double n0_for_snr(const TargetScene& scene, const Waveform& wf, double snr_db,
                  const QuadratureConfig& quad = {});

// Shared by the SNR helpers and the information-matrix assembly.
double reference_energy(const TargetScene& scene, const Waveform& wf,
                        const QuadratureConfig& quad = {});

}  // namespace wbcrlb
