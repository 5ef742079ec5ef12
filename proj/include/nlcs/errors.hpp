#pragma once

#include <stdexcept>
#include <string>

namespace nlcs {

/// Invalid user configuration (grid, truncation, time step, file contents).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument value was violated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed (eigensolver, residual check, overflow).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two Bloch bands are closer than the configured gap tolerance.
class NearDegeneracyError : public NumericalError {
 public:
  NearDegeneracyError(const std::string& what, double gap)
      : NumericalError(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// The envelope (or field) left the resolvable regime before the requested time.
class BlowupError : public NumericalError {
 public:
  BlowupError(const std::string& what, double t_abort, double t_c_estimate,
              double sup_ratio)
      : NumericalError(what),
        t_abort_(t_abort),
        t_c_estimate_(t_c_estimate),
        sup_ratio_(sup_ratio) {}

  double abort_time() const noexcept { return t_abort_; }
  double tc_estimate() const noexcept { return t_c_estimate_; }
  double sup_ratio() const noexcept { return sup_ratio_; }

 private:
  double t_abort_;
  double t_c_estimate_;
  double sup_ratio_;
};

}  // namespace nlcs
