#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wbcrlb/fisher.hpp"
#include "wbcrlb/scene.hpp"
#include "wbcrlb/types.hpp"
#include "wbcrlb/waveform.hpp"

namespace wbcrlb {

// Gamma^(k)(i, j) = (tau_i - tau_j)^k in SI seconds^k. The series assembly
// below works on copies rescaled to time units of T; this accessor is the
// plain contract value.
Eigen::MatrixXd gamma_matrix(const TargetScene& scene, int k);

// Truncated series blocks: every term whose Gamma order is at most K.
// f11/f12/f22 keep their small imaginary leftover (it vanishes for real
// coefficients); the reduction uses the real parts.
struct SeriesBlocks {
  int truncation = 0;
  cplx f11, f12, f22;
  Eigen::VectorXcd f31, f32;
  Eigen::MatrixXcd f33;
  bool exact_f33 = false;  // set when f33 was replaced by the integral value
};

SeriesBlocks series_blocks(const TargetScene& scene, const Waveform& wf,
                           double n0, int truncation,
                           const QuadratureConfig& quad = {});

// K-truncated approximate CRLBs. By default the nuisance block is taken at
// its integral value, which keeps it invertible at low K.
CrlbResult approx_crlb(const TargetScene& scene, const Waveform& wf, double n0,
                       int truncation, bool exact_f33 = true,
                       const QuadratureConfig& quad = {});

struct DecayRow {
  int truncation = 0;
  double crlb_tau_k = 0.0;
  double crlb_gamma_k = 0.0;
  double gap_tau = 0.0;    // |crlb_tau_k - crlb_tau| / crlb_tau
  double gap_gamma = 0.0;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  double crlb_tau = 0.0;   // integral reference
  double crlb_gamma = 0.0;
  // Decay-rate diagnostics: if gaps follow rho^(K+1)/(K+1)!, consecutive
  // ratios times (K+2) recover rho. Median over the decreasing pairs.
  double rho_hat_tau = 0.0;
  double rho_hat_gamma = 0.0;
};

DecayTable truncation_decay(const TargetScene& scene, const Waveform& wf,
                            double n0, const std::vector<int>& truncations,
                            const QuadratureConfig& quad = {});

}  // namespace wbcrlb
