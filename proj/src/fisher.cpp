#include "wbcrlb/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wbcrlb/moments.hpp"

namespace wbcrlb {

std::string Provenance::label() const {
  switch (kind) {
    case Kind::integral:
      return "integral";
    case Kind::series:
      return "series(" + std::to_string(series_k) + ")";
    case Kind::finite_difference:
      return "finite-difference";
  }
  return "unknown";
}

namespace {

struct PairIntegrals {
  cplx a;  // conj(s')(t) s'(t+c)
  cplx b;  // t conj(s')(t+c) s'(t)
  cplx c;  // t (t+c) conj(s')(t) s'(t+c)
  cplx d;  // t conj(s)(t+c) s'(t)
  cplx e;  // conj(s)(t) s'(t+c)
  cplx g;  // conj(s)(t) s(t+c)
};

PairIntegrals pair_integrals(const Waveform& wf, double shift,
                             const QuadratureConfig& quad) {
  PairIntegrals out{};
  const double T = wf.duration();
  const double lo = std::max(0.0, -shift);
  const double hi = std::min(T, T - shift);
  if (hi <= lo) return out;  // disjoint supports, exactly zero
  out.a = integrate(
      [&](double t) {
        return std::conj(wf.interior(t, 1)) * wf.interior(t + shift, 1);
      },
      lo, hi, quad);
  out.b = integrate(
      [&](double t) {
        return t * std::conj(wf.interior(t + shift, 1)) * wf.interior(t, 1);
      },
      lo, hi, quad);
  out.c = integrate(
      [&](double t) {
        return t * (t + shift) * std::conj(wf.interior(t, 1)) *
               wf.interior(t + shift, 1);
      },
      lo, hi, quad);
  out.d = integrate(
      [&](double t) {
        return t * std::conj(wf.interior(t + shift, 0)) * wf.interior(t, 1);
      },
      lo, hi, quad);
  out.e = integrate(
      [&](double t) {
        return std::conj(wf.interior(t, 0)) * wf.interior(t + shift, 1);
      },
      lo, hi, quad);
  out.g = integrate(
      [&](double t) {
        return std::conj(wf.interior(t, 0)) * wf.interior(t + shift, 0);
      },
      lo, hi, quad);
  return out;
}

double condition_number(const Eigen::MatrixXcd& herm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm,
                                                     Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

FisherBlocks fisher_blocks(const TargetScene& scene, const Waveform& wf,
                           double n0, const QuadratureConfig& quad) {
  if (!(n0 > 0.0)) throw error("fisher_blocks: n0 must be > 0");
  const int p = scene.scatterers();
  const double gamma = scene.gamma();
  const Eigen::VectorXcd& x = scene.coefficients();

  std::vector<PairIntegrals> lag(static_cast<std::size_t>(2 * p - 1));
  for (int l = -(p - 1); l <= p - 1; ++l)
    lag[static_cast<std::size_t>(l + p - 1)] =
        pair_integrals(wf, gamma * scene.delta() * l, quad);
  const auto at = [&](int l) -> const PairIntegrals& {
    return lag[static_cast<std::size_t>(l + p - 1)];
  };

  cplx f11{}, f12{}, f22{};
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const cplx w = std::conj(x[i]) * x[j];
      f11 += w * at(i - j).a;
      f12 += w * at(j - i).b;
      f22 += w * at(i - j).c;
    }
  }

  FisherBlocks blocks;
  blocks.f11 = 2.0 * gamma / n0 * f11.real();
  blocks.f12 = -2.0 / (gamma * n0) * f12.real();
  blocks.f22 = 2.0 / (gamma * gamma * gamma * n0) * f22.real();
  blocks.f31 = Eigen::VectorXcd::Zero(p);
  blocks.f32 = Eigen::VectorXcd::Zero(p);
  blocks.f33 = Eigen::MatrixXcd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      blocks.f31[i] += -2.0 / n0 * x[j] * at(i - j).e;
      blocks.f32[i] += 2.0 / (gamma * gamma * n0) * x[j] * at(j - i).d;
      blocks.f33(i, j) = 2.0 / (gamma * n0) * at(i - j).g;
    }
  }
  blocks.f33 = 0.5 * (blocks.f33 + blocks.f33.adjoint().eval());
  blocks.provenance = Provenance{Provenance::Kind::integral, 0};

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blocks.f33,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw singular_block_error(
        "nuisance block is not positive definite; the scene/waveform "
        "combination is ill-posed");
  return blocks;
}

SchurResult schur_reduce(const FisherBlocks& blocks, ReductionPath path) {
  const double cond = condition_number(blocks.f33);
  if (!(cond < 1e12))
    throw singular_block_error(
        "nuisance block condition number " + std::to_string(cond) +
        " exceeds 1e12; scene is too close to degenerate");

  ReductionPath chosen = path;
  if (path == ReductionPath::auto_detect) {
    const double imag_norm =
        blocks.f33.imag().norm() + blocks.f31.imag().norm() +
        blocks.f32.imag().norm();
    const double scale = blocks.f33.norm() + blocks.f31.norm() +
                         blocks.f32.norm() + 1e-300;
    chosen = (imag_norm <= 1e-12 * scale) ? ReductionPath::real_only
                                          : ReductionPath::complex_full;
  }

  SchurResult out;
  out.f33_condition = cond;
  out.f11_scale = std::abs(blocks.f11);
  out.f22_scale = std::abs(blocks.f22);
  if (chosen == ReductionPath::real_only) {
    const Eigen::MatrixXd f33 = blocks.f33.real();
    const Eigen::VectorXd f31 = blocks.f31.real();
    const Eigen::VectorXd f32 = blocks.f32.real();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(f33);
    if (ldlt.info() != Eigen::Success)
      throw singular_block_error("nuisance block factorization failed");
    const Eigen::VectorXd y1 = ldlt.solve(f31);
    const Eigen::VectorXd y2 = ldlt.solve(f32);
    out.a11 = blocks.f11 - f31.dot(y1);
    out.a12 = blocks.f12 - f31.dot(y2);
    out.a22 = blocks.f22 - f32.dot(y2);
  } else {
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(blocks.f33);
    if (ldlt.info() != Eigen::Success)
      throw singular_block_error("nuisance block factorization failed");
    const Eigen::VectorXcd y1 = ldlt.solve(blocks.f31);
    const Eigen::VectorXcd y2 = ldlt.solve(blocks.f32);
    out.a11 = blocks.f11 - (blocks.f31.adjoint() * y1)(0).real();
    out.a12 = blocks.f12 - (blocks.f31.adjoint() * y2)(0).real();
    out.a22 = blocks.f22 - (blocks.f32.adjoint() * y2)(0).real();
  }
  return out;
}

namespace {

CrlbResult assemble_crlb(const SchurResult& s, const Provenance& prov) {
  const double det = s.a11 * s.a22 - s.a12 * s.a12;
  if (!(det > 0.0) || !(s.a11 > 0.0) || !(s.a22 > 0.0))
    throw degenerate_error(
        "reduced information is not positive definite (det " +
        std::to_string(det) + ")");
  // A surviving share at rounding level means the parameter is fully
  // confounded with the nuisance amplitudes (a pure tone's delay, say).
  if (s.a11 <= 1e-10 * s.f11_scale || s.a22 <= 1e-10 * s.f22_scale)
    throw degenerate_error(
        "reduced information is pure cancellation residue; the parameter "
        "is not identifiable in this scene");
  CrlbResult out;
  out.crlb_tau = s.a22 / det;
  out.crlb_gamma = s.a11 / det;
  out.a11 = s.a11;
  out.a12 = s.a12;
  out.a22 = s.a22;
  out.f33_condition = s.f33_condition;
  out.provenance = prov;
  return out;
}

}  // namespace

CrlbResult crlb(const FisherBlocks& blocks, ReductionPath path) {
  return assemble_crlb(schur_reduce(blocks, path), blocks.provenance);
}

CrlbResult crlb_single(const Waveform& wf, double x, double gamma, double n0,
                       const QuadratureConfig& quad) {
  if (!(gamma > 0.0)) throw error("crlb_single: gamma must be > 0");
  if (!(n0 > 0.0)) throw error("crlb_single: n0 must be > 0");
  const MomentTable tab = moments(wf, 1, quad);
  const double m00 = tab.m(0, 0);
  const double m01 = tab.m(0, 1);
  const double m11 = tab.m(1, 1);
  const double m21 = tab.m(2, 1);
  if (m00 <= 1e-30 || m01 <= 1e-30)
    throw degenerate_error("crlb_single: degenerate waveform");
  const double T = wf.duration();
  // Zero-lag cross integrals. For an envelope that is smooth on the whole
  // line these reduce to j*mt(0,0) and -m(0,0)/2 + j*mt(1,0); a rectangular
  // window cut leaves their real parts as boundary residue, which the
  // general pipeline sees through its quadratures all the same.
  const cplx e0 = integrate(
      [&](double t) { return std::conj(wf.interior(t, 0)) * wf.interior(t, 1); },
      0.0, T, quad);
  const cplx d0 = integrate(
      [&](double t) {
        return t * std::conj(wf.interior(t, 0)) * wf.interior(t, 1);
      },
      0.0, T, quad);

  const double xx = x * x;
  SchurResult s;
  s.a11 = 2.0 * gamma * xx / n0 * (m01 - std::norm(e0) / m00);
  s.a12 = -2.0 * xx / (gamma * n0) *
          (m11 - (std::conj(e0) * d0).real() / m00);
  s.a22 = 2.0 * xx / (gamma * gamma * gamma * n0) *
          (m21 - std::norm(d0) / m00);
  s.f33_condition = 1.0;
  s.f11_scale = 2.0 * gamma * xx / n0 * m01;
  s.f22_scale = 2.0 * xx / (gamma * gamma * gamma * n0) * m21;
  return assemble_crlb(s, Provenance{Provenance::Kind::integral, 0});
}

Eigen::MatrixXd fim_oracle_fd(const TargetScene& scene, const Waveform& wf,
                              double n0, const FdOracleConfig& cfg) {
  if (!(cfg.rel_step >= 1e-7 && cfg.rel_step <= 1e-3))
    throw error("fd oracle: rel_step must lie in [1e-7, 1e-3]");
  if (cfg.refine < 1) throw error("fd oracle: refine must be >= 1");
  if (!(n0 > 0.0)) throw error("fd oracle: n0 must be > 0");

  const int p = scene.scatterers();
  const int dim = 2 * p + 2;
  const double gamma = scene.gamma();
  const double T = wf.duration();
  const double t_end = (scene.sample_count() - 1) * scene.delta();
  const auto delays = scatterer_delays(scene);

  // Window edges of every scatterer split the sample axis into pieces on
  // which the integrand is smooth.
  std::vector<double> edges{0.0, t_end};
  for (double tp : delays) {
    if (tp > 0.0 && tp < t_end) edges.push_back(tp);
    const double hi = tp + T / gamma;
    if (hi > 0.0 && hi < t_end) edges.push_back(hi);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double a, double b) {
                            return std::abs(a - b) < 1e-9 * scene.delta();
                          }),
              edges.end());

  Eigen::VectorXd theta(dim);
  theta[0] = scene.tau();
  theta[1] = gamma;
  for (int i = 0; i < p; ++i) {
    theta[2 + i] = scene.coefficients()[i].real();
    theta[2 + p + i] = scene.coefficients()[i].imag();
  }
  Eigen::VectorXd step(dim);
  step[0] = cfg.rel_step * std::max(std::abs(theta[0]), T);
  step[1] = cfg.rel_step * std::max(std::abs(theta[1]), 1.0);
  for (int i = 2; i < dim; ++i)
    step[i] = cfg.rel_step * std::max(std::abs(theta[i]), 1.0);

  const auto assemble = [&](const Eigen::VectorXd& dstep) {
    Eigen::MatrixXd fim = Eigen::MatrixXd::Zero(dim, dim);
    const double max_h = scene.delta() / cfg.refine;
    std::vector<cplx> mu_plus, mu_minus;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double lo = edges[e];
      const double hi = edges[e + 1];
      if (hi - lo < 1e-12 * scene.delta()) continue;
      const int nodes = std::max(2, static_cast<int>(std::ceil((hi - lo) / max_h)) + 1);
      const double h = (hi - lo) / (nodes - 1);
      const double mid = 0.5 * (lo + hi);
      // Window membership frozen at the base parameter point.
      std::vector<bool> inside(static_cast<std::size_t>(p));
      for (int q = 0; q < p; ++q) {
        const double arg = gamma * (mid - delays[q]);
        inside[static_cast<std::size_t>(q)] = arg > 0.0 && arg < T;
      }
      const auto mu = [&](const Eigen::VectorXd& th, double t) {
        cplx acc{};
        for (int q = 0; q < p; ++q) {
          if (!inside[static_cast<std::size_t>(q)]) continue;
          const double tq = th[0] + q * scene.delta();
          acc += cplx(th[2 + q], th[2 + p + q]) *
                 wf.interior(th[1] * (t - tq), 0);
        }
        return acc;
      };
      Eigen::MatrixXcd jac(nodes, dim);
      for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp[i] += dstep[i];
        tm[i] -= dstep[i];
        for (int k = 0; k < nodes; ++k) {
          const double t = (k == nodes - 1) ? hi : lo + k * h;
          jac(k, i) = (mu(tp, t) - mu(tm, t)) / (2.0 * dstep[i]);
        }
      }
      Eigen::VectorXd w = Eigen::VectorXd::Constant(nodes, h);
      w[0] *= 0.5;
      w[nodes - 1] *= 0.5;
      fim.noalias() +=
          2.0 / n0 * (jac.adjoint() * w.asDiagonal() * jac).real();
    }
    return fim;
  };

  Eigen::MatrixXd fim = assemble(step);
  if (cfg.verify_step) {
    const Eigen::MatrixXd fim2 = assemble(0.5 * step);
    const CrlbResult c1 = crlb_from_fim(fim);
    const CrlbResult c2 = crlb_from_fim(fim2);
    const double dt = std::abs(c1.crlb_tau - c2.crlb_tau) / c2.crlb_tau;
    const double dg = std::abs(c1.crlb_gamma - c2.crlb_gamma) / c2.crlb_gamma;
    if (dt > cfg.step_tol || dg > cfg.step_tol)
      throw step_instability_error(
          "fd oracle: step sizes disagree (tau " + std::to_string(dt) +
          ", gamma " + std::to_string(dg) + ")");
  }
  return fim;
}

CrlbResult crlb_from_fim(const Eigen::MatrixXd& fim) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fim,
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw singular_block_error("full information matrix is not positive "
                               "definite");
  const Eigen::MatrixXd inv = fim.inverse();
  CrlbResult out;
  out.crlb_tau = inv(0, 0);
  out.crlb_gamma = inv(1, 1);
  // Effective 2x2 information for reference alongside the bounds.
  const double det = inv(0, 0) * inv(1, 1) - inv(0, 1) * inv(0, 1);
  out.a11 = inv(1, 1) / det;
  out.a12 = -inv(0, 1) / det;
  out.a22 = inv(0, 0) / det;
  out.f33_condition = 0.0;
  out.provenance = Provenance{Provenance::Kind::finite_difference, 0};
  return out;
}

}  // namespace wbcrlb
