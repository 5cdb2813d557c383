#pragma once

#include <stdexcept>

#include "mactl/linear_system.hpp"
#include "mactl/policies.hpp"

namespace mactl {

class NotStabilizable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InfeasibleDesign : public std::runtime_error {
public:
  InfeasibleDesign(double lo, double hi);
  double gamma_lo, gamma_hi;
};

struct RiccatiOptions {
  double rel_tol = 1e-10;
  long max_iters = 100000;
};

/// Infinite-horizon LQR gain by fixed-point iteration on the discrete ARE
///   P <- Q + A'PA - A'PB (R + B'PB)^{-1} B'PA,   K = (R + B'PB)^{-1} B'PA.
/// Throws NotStabilizable on divergence or if A - BK is not Schur.
LinearFeedbackd lqr_synthesize(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                               const RiccatiOptions& opt = {}, MatrixXd* P_out = nullptr);
inline LinearFeedbackd lqr_synthesize(const LinearSystemd& sys, const MatrixXd& Q, const MatrixXd& R,
                                      const RiccatiOptions& opt = {}) {
  return lqr_synthesize(sys.A(), sys.B(), Q, R, opt);
}

struct HinfDesign {
  LinearFeedbackd feedback;
  double gamma = 0.0;
  MatrixXd P;
};

/// State-feedback gain for a fixed attenuation level, or nullopt if the game
/// Riccati iteration
///   P <- Q + A'P (I + (B R^{-1} B' - gamma^{-2} I) P)^{-1} A
/// fails to converge with I - gamma^{-2} P > 0 and a Schur closed loop.
std::optional<HinfDesign> hinf_at(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                                  double gamma, const RiccatiOptions& opt = {});

/// Bisects gamma over [gamma_lo, gamma_hi] to tolerance 1e-3 and returns the
/// design at the smallest feasible level. Throws InfeasibleDesign if even
/// gamma_hi is infeasible.
HinfDesign hinf_synthesize(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R, double gamma_lo,
                           double gamma_hi, double gamma_tol = 1e-3, const RiccatiOptions& opt = {});
inline HinfDesign hinf_synthesize(const LinearSystemd& sys, const MatrixXd& Q, const MatrixXd& R, double gamma_lo,
                                  double gamma_hi) {
  return hinf_synthesize(sys.A(), sys.B(), Q, R, gamma_lo, gamma_hi);
}

}  // namespace mactl
