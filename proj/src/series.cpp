#include "wbcrlb/series.hpp"

#include <algorithm>
#include <cmath>

#include "wbcrlb/moments.hpp"

namespace wbcrlb {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double pow_int(double base, int e) {
  if (e >= 0) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
  }
  return 1.0 / pow_int(base, -e);
}

int sign_pow(int e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace

Eigen::MatrixXd gamma_matrix(const TargetScene& scene, int k) {
  if (k < 0) throw error("gamma_matrix: k must be >= 0");
  const int p = scene.scatterers();
  Eigen::MatrixXd out(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      out(i, j) = pow_int(static_cast<double>(i - j) * scene.delta(), k);
  return out;
}

SeriesBlocks series_blocks(const TargetScene& scene, const Waveform& wf,
                           double n0, int truncation,
                           const QuadratureConfig& quad) {
  if (truncation < 0) throw error("series_blocks: truncation must be >= 0");
  if (!(n0 > 0.0)) throw error("series_blocks: n0 must be > 0");
  const int K = truncation;
  const int p = scene.scatterers();
  const double gamma = scene.gamma();
  const double T = wf.duration();
  const Eigen::VectorXcd& x = scene.coefficients();

  // Every term is evaluated with time in units of T: moments, delays and
  // the noise density are rescaled, and the finished blocks are scaled back
  // to SI at the end. This keeps gamma^(2k-3), lag powers and high-order
  // moments within a tame dynamic range.
  const int k_tab = std::max(1, K / 2 + 1);
  const MomentTable tab = moments(wf, k_tab, quad);
  const auto ms = [&](int i, int k) {
    return pow_int(T, 2 * k - i - 1) * tab.m(i, k);
  };
  const auto mts = [&](int i, int k) {
    return pow_int(T, 2 * k - i) * tab.mt(i, k);
  };
  const double dh = scene.delta() / T;
  const double n0h = n0 / T;

  // x^H Gamma^(n) x and Gamma^(n) x on the rescaled lag powers.
  std::vector<cplx> lag_w(static_cast<std::size_t>(2 * p - 1));
  const auto qform = [&](int n) {
    cplx acc{};
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        acc += std::conj(x[i]) * x[j] *
               pow_int(static_cast<double>(i - j) * dh, n);
    return acc;
  };
  const auto gvec = [&](int n) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        v[i] += pow_int(static_cast<double>(i - j) * dh, n) * x[j];
    return v;
  };
  const auto gmat = [&](int n) {
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        m(i, j) = pow_int(static_cast<double>(i - j) * dh, n);
    return m;
  };

  cplx f111{}, f211{}, f112{}, f212{}, f122{}, f222{};
  Eigen::VectorXcd f131 = Eigen::VectorXcd::Zero(p);
  Eigen::VectorXcd f231 = Eigen::VectorXcd::Zero(p);
  Eigen::VectorXcd f132 = Eigen::VectorXcd::Zero(p);
  Eigen::VectorXcd f232 = Eigen::VectorXcd::Zero(p);
  Eigen::MatrixXcd f133 = Eigen::MatrixXcd::Zero(p, p);
  Eigen::MatrixXcd f233 = Eigen::MatrixXcd::Zero(p, p);

  for (int k = 0; 2 * k - 1 <= K; ++k) {
    if (2 * k <= K) {
      const cplx q_even = qform(2 * k);
      const double fe = factorial(2 * k);
      f111 += sign_pow(k) * 2.0 * pow_int(gamma, 2 * k + 1) / (fe * n0h) *
              ms(0, k + 1) * q_even;
      f112 += sign_pow(k + 1) * 2.0 * pow_int(gamma, 2 * k - 1) / (fe * n0h) *
              ms(1, k + 1) * q_even;
      f122 += sign_pow(k) * 2.0 * pow_int(gamma, 2 * k - 3) / (fe * n0h) *
              ms(2, k + 1) * q_even;
      if (k >= 1)
        f122 += sign_pow(k) * (k - 1.0) * pow_int(gamma, 2 * k - 3) /
                (factorial(2 * k - 1) * n0h) * ms(0, k) * q_even;
      const Eigen::VectorXcd gv_even = gvec(2 * k);
      f231 += sign_pow(k + 1) * 2.0 * pow_int(gamma, 2 * k) / (fe * n0h) *
              mts(0, k) * gv_even;
      f132 += sign_pow(k) * (2.0 * k - 1.0) * pow_int(gamma, 2 * k - 2) /
              (fe * n0h) * ms(0, k) * gv_even;
      f232 += sign_pow(k) * 2.0 * pow_int(gamma, 2 * k - 2) / (fe * n0h) *
              mts(1, k) * gv_even;
      f133 += sign_pow(k) * 2.0 * pow_int(gamma, 2 * k - 1) / (fe * n0h) *
              ms(0, k) * gmat(2 * k);
    }
    if (2 * k + 1 <= K) {
      const cplx q_odd = qform(2 * k + 1);
      const double fo = factorial(2 * k + 1);
      f211 += sign_pow(k) * 2.0 * pow_int(gamma, 2 * k + 2) / (fo * n0h) *
              mts(0, k + 1) * q_odd;
      f212 += sign_pow(k + 1) * 2.0 * pow_int(gamma, 2 * k) / (fo * n0h) *
              mts(1, k + 1) * q_odd;
      f222 += sign_pow(k) * 2.0 * k * k * pow_int(gamma, 2 * k - 2) /
              (fo * n0h) * mts(0, k) * q_odd;
      f222 += sign_pow(k) * 2.0 * pow_int(gamma, 2 * k - 2) / (fo * n0h) *
              mts(2, k + 1) * q_odd;
      const Eigen::VectorXcd gv_odd = gvec(2 * k + 1);
      f132 += sign_pow(k + 1) * 2.0 * pow_int(gamma, 2 * k - 1) / (fo * n0h) *
              ms(1, k + 1) * gv_odd;
      f232 += sign_pow(k) * 2.0 * k * pow_int(gamma, 2 * k - 1) / (fo * n0h) *
              mts(0, k) * gv_odd;
      f233 += sign_pow(k) * 2.0 * pow_int(gamma, 2 * k) / (fo * n0h) *
              mts(0, k) * gmat(2 * k + 1);
    }
    if (k >= 1 && 2 * k - 1 <= K) {
      f131 += sign_pow(k + 1) * 2.0 * pow_int(gamma, 2 * k - 1) /
              (factorial(2 * k - 1) * n0h) * ms(0, k) * gvec(2 * k - 1);
    }
  }

  // Scale back to SI: the blocks carry fixed powers of 1/T.
  SeriesBlocks out;
  out.truncation = K;
  out.f11 = (f111 + cplx(0.0, 1.0) * f211) / (T * T);
  out.f12 = (f112 + cplx(0.0, 1.0) * f212) / T;
  out.f22 = f122 + cplx(0.0, 1.0) * f222;
  out.f31 = (f131 + cplx(0.0, 1.0) * f231) / T;
  out.f32 = f132 + cplx(0.0, 1.0) * f232;
  Eigen::MatrixXcd f33 = f133 + cplx(0.0, 1.0) * f233;
  out.f33 = 0.5 * (f33 + f33.adjoint().eval());
  return out;
}

CrlbResult approx_crlb(const TargetScene& scene, const Waveform& wf, double n0,
                       int truncation, bool exact_f33,
                       const QuadratureConfig& quad) {
  SeriesBlocks sb = series_blocks(scene, wf, n0, truncation, quad);
  FisherBlocks blocks;
  blocks.f11 = sb.f11.real();
  blocks.f12 = sb.f12.real();
  blocks.f22 = sb.f22.real();
  blocks.f31 = sb.f31;
  blocks.f32 = sb.f32;
  if (exact_f33) {
    blocks.f33 = 2.0 / (scene.gamma() * n0) * gram_matrix(scene, wf, quad);
  } else {
    blocks.f33 = sb.f33;
  }
  blocks.provenance = Provenance{Provenance::Kind::series, truncation};
  // Below convergence the truncated reduction need not be positive
  // definite, yet the ratio formulas still define the approximation (the
  // negative shares cancel); assemble them directly rather than through
  // the strict bound path.
  const SchurResult s = schur_reduce(blocks);
  const double det = s.a11 * s.a22 - s.a12 * s.a12;
  const double scale = std::abs(s.a11 * s.a22) + s.a12 * s.a12 + 1e-300;
  if (std::abs(det) <= 1e-14 * scale)
    throw degenerate_error("truncated reduction is singular at K=" +
                           std::to_string(truncation));
  CrlbResult out;
  out.crlb_tau = s.a22 / det;
  out.crlb_gamma = s.a11 / det;
  out.a11 = s.a11;
  out.a12 = s.a12;
  out.a22 = s.a22;
  out.f33_condition = s.f33_condition;
  out.provenance = blocks.provenance;
  return out;
}

DecayTable truncation_decay(const TargetScene& scene, const Waveform& wf,
                            double n0, const std::vector<int>& truncations,
                            const QuadratureConfig& quad) {
  const CrlbResult ref = crlb(fisher_blocks(scene, wf, n0, quad));
  DecayTable table;
  table.crlb_tau = ref.crlb_tau;
  table.crlb_gamma = ref.crlb_gamma;
  for (int k : truncations) {
    const CrlbResult approx = approx_crlb(scene, wf, n0, k, true, quad);
    DecayRow row;
    row.truncation = k;
    row.crlb_tau_k = approx.crlb_tau;
    row.crlb_gamma_k = approx.crlb_gamma;
    row.gap_tau = std::abs(approx.crlb_tau - ref.crlb_tau) / ref.crlb_tau;
    row.gap_gamma =
        std::abs(approx.crlb_gamma - ref.crlb_gamma) / ref.crlb_gamma;
    table.rows.push_back(row);
  }
  const auto rho = [&](auto gap_of) {
    std::vector<double> est;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const double g0 = gap_of(table.rows[i]);
      const double g1 = gap_of(table.rows[i + 1]);
      if (g0 > 0.0 && g1 > 0.0 && g1 < g0 &&
          table.rows[i + 1].truncation == table.rows[i].truncation + 1)
        est.push_back(g1 / g0 * (table.rows[i].truncation + 2));
    }
    if (est.empty()) return 0.0;
    std::nth_element(est.begin(), est.begin() + est.size() / 2, est.end());
    return est[est.size() / 2];
  };
  table.rho_hat_tau = rho([](const DecayRow& r) { return r.gap_tau; });
  table.rho_hat_gamma = rho([](const DecayRow& r) { return r.gap_gamma; });
  return table;
}

}  // namespace wbcrlb
