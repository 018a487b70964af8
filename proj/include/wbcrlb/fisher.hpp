#pragma once

#include <Eigen/Dense>
#include <string>

#include "wbcrlb/quadrature.hpp"
#include "wbcrlb/scene.hpp"
#include "wbcrlb/types.hpp"
#include "wbcrlb/waveform.hpp"

namespace wbcrlb {

struct Provenance {
  enum class Kind { integral, series, finite_difference };
  Kind kind = Kind::integral;
  int series_k = 0;
  std::string label() const;
};

// Reduced Fisher information for theta = [tau, gamma, Re x, Im x]: the two
// real scalars' block, the complex cross vectors and the complex nuisance
// block (f31 = F_31 + j F_41 and so on).
struct FisherBlocks {
  double f11 = 0.0, f12 = 0.0, f22 = 0.0;
  Eigen::VectorXcd f31, f32;
  Eigen::MatrixXcd f33;
  Provenance provenance;
};

struct SchurResult {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;
  double f33_condition = 0.0;
  // pre-reduction magnitudes, kept so downstream checks can tell a real
  // bound from pure cancellation residue
  double f11_scale = 0.0, f22_scale = 0.0;
};

struct CrlbResult {
  double crlb_tau = 0.0;    // s^2
  double crlb_gamma = 0.0;  // unitless^2
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;
  double f33_condition = 0.0;
  Provenance provenance;
};

// Blocks by quadrature of the pair integrals, truncated to the support
// overlap of the two factors. Pairs whose supports are disjoint contribute
// exactly zero. f33 is Hermitian-symmetrized before it is returned.
FisherBlocks fisher_blocks(const TargetScene& scene, const Waveform& wf,
                           double n0, const QuadratureConfig& quad = {});

// a_ij = F_ij - Re{f3i^H f33^{-1} f3j} via a Hermitian solve. The real
// path drops the imaginary parts first (valid when they vanish, i.e. real
// coefficients and a real envelope); auto_detect picks it in exactly that
// case and the full complex reduction otherwise.
enum class ReductionPath { auto_detect, complex_full, real_only };

SchurResult schur_reduce(const FisherBlocks& blocks,
                         ReductionPath path = ReductionPath::auto_detect);

CrlbResult crlb(const FisherBlocks& blocks,
                ReductionPath path = ReductionPath::auto_detect);

// Single-scatterer closed form: no pair machinery, only zero-lag moment
// integrals. Matches the P = 1 general pipeline to solver precision.
CrlbResult crlb_single(const Waveform& wf, double x, double gamma, double n0,
                       const QuadratureConfig& quad = {});

// Finite-difference oracle: builds d(mu)/d(theta) by central differences of
// mu(theta) = Phi x with the window membership frozen at the base point, and
// assembles the full (2P+2) x (2P+2) information matrix as a trapezoid sum
// over the sample axis (refine nodes per sample, pieces split at the
// window edges of every scatterer).
struct FdOracleConfig {
  double rel_step = 1e-5;     // relative central-difference step
  int refine = 4;             // quadrature nodes per sampling interval
  bool verify_step = true;    // re-run at rel_step/2 and compare
  double step_tol = 5e-3;     // allowed CRLB disagreement between steps
};

Eigen::MatrixXd fim_oracle_fd(const TargetScene& scene, const Waveform& wf,
                              double n0, const FdOracleConfig& cfg = {});

// Inverts a full information matrix and reads the (tau, gamma) diagonal.
CrlbResult crlb_from_fim(const Eigen::MatrixXd& fim);

}  // namespace wbcrlb
