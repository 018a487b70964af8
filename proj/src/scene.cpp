#include "wbcrlb/scene.hpp"

#include <cmath>

#include "wbcrlb/random.hpp"

namespace wbcrlb {

TargetScene TargetScene::create(const SceneParams& params, const Waveform& wf,
                                std::optional<int> sample_count) {
  if (!(params.gamma > 0.0)) throw error("scene: gamma must be > 0");
  if (!(params.delta > 0.0)) throw error("scene: delta must be > 0");
  if (params.scatterers < 1) throw error("scene: scatterer count must be >= 1");
  if (params.tau < 0.0) throw error("scene: tau must be >= 0");

  TargetScene scene;
  scene.gamma_ = params.gamma;
  scene.delta_ = params.delta;
  scene.p_ = params.scatterers;
  scene.c_ = params.propagation_speed;
  if (params.coefficients.size() == 0) {
    scene.x_ = Eigen::VectorXcd::Ones(scene.p_);
  } else if (params.coefficients.size() == scene.p_) {
    scene.x_ = params.coefficients;
  } else {
    throw error("scene: coefficient vector length does not match P");
  }

  // tau/delta must be integral for the sampled model; round and remember.
  const double ratio = params.tau / params.delta;
  const double rounded = std::round(ratio);
  scene.tau_ = rounded * params.delta;
  scene.tau_adjustment_ = scene.tau_ - params.tau;
  if (std::abs(ratio - rounded) <= 1e-9) scene.tau_adjustment_ = 0.0;

  const double tau_last = scene.tau_ + (scene.p_ - 1) * scene.delta_;
  const double needed = tau_last / scene.delta_ +
                        wf.duration() / (scene.gamma_ * scene.delta_);
  if (sample_count.has_value()) {
    scene.n_ = *sample_count;
  } else {
    scene.n_ = static_cast<int>(std::ceil(1.05 * needed)) + 1;
  }
  // Assumption "the echo is completely sampled".
  if (scene.gamma_ * ((scene.n_ - 1) * scene.delta_ - tau_last) <
      wf.duration() - 1e-12 * wf.duration()) {
    throw support_violation_error(
        "echo not completely sampled: need N >= " +
        std::to_string(static_cast<int>(std::ceil(needed)) + 1) + ", got " +
        std::to_string(scene.n_));
  }
  return scene;
}

bool TargetScene::real_coefficients() const {
  for (int i = 0; i < x_.size(); ++i)
    if (x_[i].imag() != 0.0) return false;
  return true;
}

std::vector<double> scatterer_delays(const TargetScene& scene) {
  std::vector<double> out(static_cast<std::size_t>(scene.scatterers()));
  for (int p = 0; p < scene.scatterers(); ++p)
    out[static_cast<std::size_t>(p)] = scene.tau() + p * scene.delta();
  return out;
}

Eigen::MatrixXcd measurement_matrix(const TargetScene& scene,
                                    const Waveform& wf) {
  const int n = scene.sample_count();
  const int p = scene.scatterers();
  Eigen::MatrixXcd phi(n, p);
  const auto delays = scatterer_delays(scene);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) {
      const double t = scene.gamma() * (i * scene.delta() - delays[j]);
      phi(i, j) = wf.evaluate(t);
    }
  }
  return phi;
}

namespace {

// integral over the support overlap of conj(s(t)) s(t + shift)
cplx lag_autocorrelation(const Waveform& wf, double shift,
                         const QuadratureConfig& quad) {
  const double T = wf.duration();
  const double a = std::max(0.0, -shift);
  const double b = std::min(T, T - shift);
  if (b <= a) return cplx{};
  return integrate(
      [&](double t) {
        return std::conj(wf.interior(t, 0)) * wf.interior(t + shift, 0);
      },
      a, b, quad);
}

}  // namespace

Eigen::MatrixXcd gram_matrix(const TargetScene& scene, const Waveform& wf,
                             const QuadratureConfig& quad) {
  const int p = scene.scatterers();
  std::vector<cplx> lag(static_cast<std::size_t>(2 * p - 1));
  for (int l = -(p - 1); l <= p - 1; ++l)
    lag[static_cast<std::size_t>(l + p - 1)] =
        lag_autocorrelation(wf, scene.gamma() * scene.delta() * l, quad);
  Eigen::MatrixXcd gram(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      gram(i, j) = lag[static_cast<std::size_t>(i - j + p - 1)];
  // Quadrature noise breaks exact Hermitian symmetry.
  return 0.5 * (gram + gram.adjoint().eval());
}

Eigen::VectorXcd synthesize_echo(const TargetScene& scene, const Waveform& wf,
                                 const NoiseModel& noise,
                                 std::uint64_t stream) {
  if (noise.n0 < 0.0) throw error("noise density must be >= 0");
  const Eigen::MatrixXcd phi = measurement_matrix(scene, wf);
  Eigen::VectorXcd y = phi * scene.coefficients();
  if (noise.n0 > 0.0) {
    const double sigma = std::sqrt(noise.n0 / scene.delta());
    GaussianStream gauss(noise.seed, stream);
    for (int i = 0; i < y.size(); ++i)
      y[i] += sigma * gauss.at(static_cast<std::uint64_t>(i));
  }
  return y;
}

double reference_energy(const TargetScene& scene, const Waveform& wf,
                        const QuadratureConfig& quad) {
  const Eigen::MatrixXcd gram = gram_matrix(scene, wf, quad);
  const cplx q = scene.coefficients().adjoint() * gram * scene.coefficients();
  return q.real();
}

double snr_db(const TargetScene& scene, const Waveform& wf, double n0,
              const QuadratureConfig& quad) {
  if (!(n0 > 0.0)) throw error("snr: n0 must be > 0");
  const double energy = reference_energy(scene, wf, quad);
  if (energy <= 0.0)
    throw degenerate_error("snr: nonpositive reference energy x^H Lambda x");
  return 10.0 * std::log10(energy / (scene.gamma() * n0));
}

double n0_for_snr(const TargetScene& scene, const Waveform& wf, double snr_db,
                  const QuadratureConfig& quad) {
  const double energy = reference_energy(scene, wf, quad);
  if (energy <= 0.0)
    throw degenerate_error("snr: nonpositive reference energy x^H Lambda x");
  return energy / (scene.gamma() * std::pow(10.0, snr_db / 10.0));
}

}  // namespace wbcrlb
