#pragma once

#include <optional>

#include "mactl/linear_system.hpp"

namespace mactl {

/// Strong stability certificate: |A^n| <= kappa^2 (1 - gamma)^n.
struct StrongStabilityCert {
  double kappa = 1.0;
  double gamma = 1.0;
  double spectral_radius = 0.0;
};

/// Outcome of certify_stability. The certificate is present only when the
/// spectral radius is below 1 - margin.
struct StabilityCheck {
  double spectral_radius = 0.0;
  std::optional<StrongStabilityCert> cert;

  explicit operator bool() const { return cert.has_value(); }
};

double spectral_radius(const MatrixXd& A);

/// Largest |A^n|_2 / q^n over 0 <= n <= max_power.
double power_envelope(const MatrixXd& A, double q, int max_power = 200);

/// Certifies rho(A) < 1 - margin and fits (kappa, gamma) from the powers of A:
/// the decay rate is fixed at 1 - gamma = (1 + rho) / 2 and kappa^2 is the
/// smallest envelope constant over n <= 200.
StabilityCheck certify_stability(const MatrixXd& A, double margin = 1e-9);
inline StabilityCheck certify_stability(const LinearSystemd& sys, double margin = 1e-9) {
  return certify_stability(sys.A(), margin);
}

}  // namespace mactl
