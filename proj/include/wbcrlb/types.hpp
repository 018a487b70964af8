#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace wbcrlb {

using cplx = std::complex<double>;

// Error hierarchy. Everything thrown by the library derives from error so
// callers (CLI, tests) can catch one type and still tell conditions apart.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Successive quadrature refinements disagreed beyond tolerance.
class quadrature_error : public error {
 public:
  explicit quadrature_error(const std::string& what) : error(what) {}
};

// Requested derivative order exceeds the configured maximum.
class order_error : public error {
 public:
  explicit order_error(const std::string& what) : error(what) {}
};

// Waveform or scene quantity too close to zero to work with (all-zero
// signal, nonpositive reference energy, ...).
class degenerate_error : public error {
 public:
  explicit degenerate_error(const std::string& what) : error(what) {}
};

// Echo not completely sampled: gamma*((N-1)*delta - tau_P) < T.
class support_violation_error : public error {
 public:
  explicit support_violation_error(const std::string& what) : error(what) {}
};

// Nuisance block not positive definite / too ill-conditioned to reduce.
class singular_block_error : public error {
 public:
  explicit singular_block_error(const std::string& what) : error(what) {}
};

// Finite-difference oracle: two step sizes disagree beyond tolerance.
class step_instability_error : public error {
 public:
  explicit step_instability_error(const std::string& what) : error(what) {}
};

// Scenario configuration problems; `field` holds the offending key path.
class validation_error : public error {
 public:
  validation_error(const std::string& field, const std::string& what)
      : error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace wbcrlb
