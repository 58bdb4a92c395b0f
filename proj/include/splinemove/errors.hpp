#pragma once

// Error taxonomy shared by the whole library.
//
// Every failure mode that callers are expected to branch on gets its own
// type; the CLI maps them onto its stable exit codes (usage 2,
// parameterization failure 3, solver failure 4).

#include <stdexcept>
#include <string>
#include <vector>

namespace splinemove {

/// Invalid argument to an operation (degree mismatch, parameter out of
/// range, derivative order above degree, ...).
class argument_error : public std::invalid_argument {
 public:
  explicit argument_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Geometric precondition violated (zero-area boundary, endpoint mismatch,
/// containment failure, degenerate input).
class geometry_error : public std::runtime_error {
 public:
  explicit geometry_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An internal invariant that the library itself is supposed to maintain
/// was violated (e.g. a slip split point landed on a corner despite the
/// corner-avoidance offset).
class internal_error : public std::logic_error {
 public:
  explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

/// Patch interfaces or spline spaces that must match do not.
class interface_error : public std::runtime_error {
 public:
  explicit interface_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Snapshot pairing failed (mismatched patch counts / control-net shapes).
class pairing_error : public std::runtime_error {
 public:
  explicit pairing_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested operation is outside the supported capability envelope
/// (e.g. biharmonic extension on a degree-1 space).
class capability_error : public std::runtime_error {
 public:
  explicit capability_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A quality sample hit a degenerate tangent (zero column norm). Carries
/// the offending patch and parametric location.
class degenerate_tangent_error : public std::runtime_error {
 public:
  degenerate_tangent_error(const std::string& msg, int patch,
                           std::vector<double> xi)
      : std::runtime_error(msg), patch_index(patch), xi_location(std::move(xi)) {}
  int patch_index = -1;
  std::vector<double> xi_location;
};

/// An energy was evaluated on a configuration outside its domain
/// (non-positive Jacobian determinant under the quality energy). Carries
/// the first offending quadrature point.
class barrier_violation_error : public std::runtime_error {
 public:
  barrier_violation_error(const std::string& msg, int patch,
                          std::vector<double> xi, double det)
      : std::runtime_error(msg), patch_index(patch), xi_location(std::move(xi)),
        det_value(det) {}
  int patch_index = -1;
  std::vector<double> xi_location;
  double det_value = 0.0;
};

/// Fold removal did not certify a positive net within its budget, or a
/// rebuilt domain failed validation. Carries diagnostics for reporting.
class parameterization_failure : public std::runtime_error {
 public:
  parameterization_failure(const std::string& msg, double e_fold, double worst_det)
      : std::runtime_error(msg), final_e_fold(e_fold), worst_determinant(worst_det) {}
  parameterization_failure(const std::string& msg, double e_fold, double worst_det,
                           double theta, int patch)
      : std::runtime_error(msg), final_e_fold(e_fold), worst_determinant(worst_det),
        theta_deg(theta), patch_index(patch) {}
  double final_e_fold = 0.0;
  double worst_determinant = 0.0;
  double theta_deg = 0.0;
  int patch_index = -1;
};

/// A linear solve failed (singular or numerically unusable system).
class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace splinemove
