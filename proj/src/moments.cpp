#include "wbcrlb/moments.hpp"

#include <algorithm>
#include <cmath>

namespace wbcrlb {

namespace {

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

int sign_pow(int e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace

MomentTable::MomentTable(int k_max, std::vector<double> m,
                         std::vector<double> mt)
    : k_max_(k_max), m_(std::move(m)), mt_(std::move(mt)) {}

double MomentTable::m(int i, int k) const {
  if (i < 0 || i > 2 || k < 0 || k > k_max_)
    throw order_error("moment m(" + std::to_string(i) + "," +
                      std::to_string(k) + ") outside table (k_max " +
                      std::to_string(k_max_) + ")");
  return m_[static_cast<std::size_t>(i) * (k_max_ + 1) + k];
}

double MomentTable::mt(int i, int k) const {
  if (i < 0 || i > 2 || k < 0 || k > k_max_)
    throw order_error("moment mt(" + std::to_string(i) + "," +
                      std::to_string(k) + ") outside table (k_max " +
                      std::to_string(k_max_) + ")");
  return mt_[static_cast<std::size_t>(i) * (k_max_ + 1) + k];
}

MomentTable moments(const Waveform& wf, int k_max,
                    const QuadratureConfig& quad) {
  if (k_max < 1) throw error("moments: k_max must be >= 1");
  if (k_max + 1 > wf.max_order())
    throw order_error("moments to k_max " + std::to_string(k_max) +
                      " need derivatives beyond the configured maximum");
  const double T = wf.duration();
  std::vector<double> m(3 * (k_max + 1)), mt(3 * (k_max + 1));
  for (int k = 0; k <= k_max; ++k) {
    for (int i = 0; i <= 2; ++i) {
      m[static_cast<std::size_t>(i) * (k_max + 1) + k] = integrate(
          [&](double t) {
            const cplx v = wf.interior(t, k);
            return pow_int(t, i) * std::norm(v);
          },
          0.0, T, quad);
      mt[static_cast<std::size_t>(i) * (k_max + 1) + k] = integrate(
          [&](double t) {
            const cplx v = std::conj(wf.interior(t, k)) * wf.interior(t, k + 1);
            return pow_int(t, i) * v.imag();
          },
          0.0, T, quad);
    }
  }
  return MomentTable(k_max, std::move(m), std::move(mt));
}

EffectiveParams effective_params(const Waveform& wf,
                                 const QuadratureConfig& quad) {
  const MomentTable tab = moments(wf, 1, quad);
  const double m00 = tab.m(0, 0);
  const double m01 = tab.m(0, 1);
  const double floor = 1e-30;
  if (m00 <= floor || m01 <= floor)
    throw degenerate_error("degenerate waveform: vanishing energy or "
                           "derivative energy");
  EffectiveParams out;
  out.energy = m00;
  out.rms_bandwidth = std::sqrt(m01 / m00);
  out.effective_duration = std::sqrt(tab.m(2, 1) / m01);
  out.duration_t2 = std::sqrt(tab.m(2, 0) / m00);
  out.time_bandwidth = out.rms_bandwidth * out.effective_duration;
  return out;
}

IdentityCheck check_identity(const Waveform& wf, MomentIdentity identity,
                             int p, int q, const QuadratureConfig& quad) {
  if (p < 0 || q < 0) throw error("identity orders must be >= 0");
  const bool t2 =
      identity == MomentIdentity::re_t2 || identity == MomentIdentity::im_t2;
  if (t2 && p != 0)
    throw error("t^2-weighted identities are stated for p = 0 only");
  const int weight = (identity == MomentIdentity::re_plain ||
                      identity == MomentIdentity::im_plain)
                         ? 0
                         : (t2 ? 2 : 1);
  const bool imag_part = identity == MomentIdentity::im_plain ||
                         identity == MomentIdentity::im_t ||
                         identity == MomentIdentity::im_t2;
  const int need = std::max(p, q);
  if (need > wf.max_order())
    throw order_error("identity orders exceed the configured maximum");

  const double lhs = integrate(
      [&](double t) {
        const cplx v = std::conj(wf.interior(t, p)) * wf.interior(t, q);
        return pow_int(t, weight) * (imag_part ? v.imag() : v.real());
      },
      0.0, wf.duration(), quad);

  // Closed forms in the moment tables. Indexed so p+q = 2k or 2k+1; the
  // table also covers max(p, q) so the error scale below is available.
  const int s = p + q;
  const int k = s / 2;
  const MomentTable tab =
      moments(wf, std::max({1, k + 1, std::max(p, q)}), quad);

  double rhs = 0.0;
  switch (identity) {
    case MomentIdentity::re_plain:
      rhs = (s % 2 == 0) ? sign_pow(p + k) * tab.m(0, k) : 0.0;
      break;
    case MomentIdentity::re_t:
      rhs = (s % 2 == 0)
                ? sign_pow(p + k) * tab.m(1, k)
                : sign_pow(p + k) * (p - k - 0.5) * tab.m(0, k);
      break;
    case MomentIdentity::re_t2:
      if (q % 2 == 0) {
        const int kk = q / 2;
        rhs = sign_pow(kk) * tab.m(2, kk);
        if (kk >= 1) rhs += sign_pow(kk + 1) * kk * kk * tab.m(0, kk - 1);
      } else {
        const int kk = (q - 1) / 2;
        rhs = sign_pow(kk + 1) * (2 * kk + 1) * tab.m(1, kk);
      }
      break;
    case MomentIdentity::im_plain:
      rhs = (s % 2 == 0) ? 0.0 : sign_pow(p + k) * tab.mt(0, k);
      break;
    case MomentIdentity::im_t:
      if (s % 2 == 0) {
        rhs = (k >= 1 && k != p) ? sign_pow(p + k) * (k - p) * tab.mt(0, k - 1)
                                 : 0.0;
      } else {
        rhs = sign_pow(p + k) * tab.mt(1, k);
      }
      break;
    case MomentIdentity::im_t2:
      if (q % 2 == 0) {
        const int kk = q / 2;
        rhs = (kk >= 1) ? sign_pow(kk) * 2.0 * kk * tab.mt(1, kk - 1) : 0.0;
      } else {
        const int kk = (q - 1) / 2;
        rhs = sign_pow(kk) * tab.mt(2, kk);
        if (kk >= 1)
          rhs -= sign_pow(kk) * static_cast<double>(kk * kk + kk) *
                 tab.mt(0, kk - 1);
      }
      break;
  }

  IdentityCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  // Normalize by the Cauchy-Schwarz bound on the cross integral; the
  // vanishing identities would otherwise divide their own quadrature
  // residue by itself.
  const double bound = std::pow(wf.duration(), weight) *
                       std::sqrt(tab.m(0, p) * tab.m(0, q));
  const double scale = std::max({std::abs(lhs), std::abs(rhs), bound, 1e-300});
  out.rel_error = std::abs(lhs - rhs) / scale;
  return out;
}

}  // namespace wbcrlb
