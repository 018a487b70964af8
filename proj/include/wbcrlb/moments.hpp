#pragma once

#include <vector>

#include "wbcrlb/quadrature.hpp"
#include "wbcrlb/types.hpp"
#include "wbcrlb/waveform.hpp"

namespace wbcrlb {

// Moment integrals of the envelope and its derivatives,
//   m(i,k)  = integral t^i |s^(k)(t)|^2 dt
//   mt(i,k) = Im integral t^i conj(s^(k)(t)) s^(k+1)(t) dt
// for i in {0,1,2} and k = 0..k_max, taken over the interior of the window.
class MomentTable {
 public:
  MomentTable(int k_max, std::vector<double> m, std::vector<double> mt);

  int k_max() const { return k_max_; }
  double m(int i, int k) const;
  double mt(int i, int k) const;

 private:
  int k_max_;
  std::vector<double> m_;   // 3 * (k_max+1), row-major in i
  std::vector<double> mt_;
};

MomentTable moments(const Waveform& wf, int k_max,
                    const QuadratureConfig& quad = {});

// Energy and the RMS spread parameters derived from the k <= 1 moments.
// rms_bandwidth is the plain moment ratio sqrt(m(0,1)/m(0,0)); for a pure
// tone at carrier f_c it evaluates to 2*pi*f_c.
struct EffectiveParams {
  double energy = 0.0;              // m(0,0)
  double rms_bandwidth = 0.0;       // sqrt(m(0,1)/m(0,0))
  double effective_duration = 0.0;  // sqrt(m(2,1)/m(0,1)), s
  double duration_t2 = 0.0;         // sqrt(m(2,0)/m(0,0)), s
  double time_bandwidth = 0.0;      // rms_bandwidth * effective_duration
};

EffectiveParams effective_params(const Waveform& wf,
                                 const QuadratureConfig& quad = {});

// Cross-derivative moment identities: each one equates a direct quadrature
// (lhs) with a closed form in the moment tables (rhs). They hold exactly
// for envelopes that are smooth on the whole line; a rectangular cut at
// the window edges leaves boundary residue in the lhs.
enum class MomentIdentity { re_plain, re_t, re_t2, im_plain, im_t, im_t2 };

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_error = 0.0;  // |lhs-rhs| / max(|lhs|, |rhs|, tiny)
};

IdentityCheck check_identity(const Waveform& wf, MomentIdentity identity,
                             int p, int q, const QuadratureConfig& quad = {});

}  // namespace wbcrlb
