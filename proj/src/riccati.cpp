#include "mactl/riccati.hpp"

#include <string>

#include "mactl/stability.hpp"

namespace mactl {

InfeasibleDesign::InfeasibleDesign(double lo, double hi)
    : std::runtime_error("H-infinity design infeasible for gamma in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]"),
      gamma_lo(lo),
      gamma_hi(hi) {}

namespace {

bool converged(const MatrixXd& next, const MatrixXd& prev, double rel_tol) {
  return (next - prev).norm() <= rel_tol * std::max(1.0, next.norm());
}

void check_shapes(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R) {
  require(A.rows() == A.cols(), "riccati: A must be square");
  require(B.rows() == A.rows(), "riccati: B must have d_x rows");
  require(Q.rows() == A.rows() && Q.cols() == A.rows(), "riccati: Q must be d_x x d_x");
  require(R.rows() == B.cols() && R.cols() == B.cols(), "riccati: R must be d_u x d_u");
}

}  // namespace

LinearFeedbackd lqr_synthesize(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                               const RiccatiOptions& opt, MatrixXd* P_out) {
  check_shapes(A, B, Q, R);
  MatrixXd P = Q;
  bool done = false;
  for (long it = 0; it < opt.max_iters; ++it) {
    const MatrixXd BtPA = B.transpose() * P * A;
    const MatrixXd S = R + B.transpose() * P * B;
    MatrixXd next = Q + A.transpose() * P * A - BtPA.transpose() * S.ldlt().solve(BtPA);
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) throw NotStabilizable("lqr_synthesize: Riccati iteration diverged");
    const bool stop = converged(next, P, opt.rel_tol);
    P = std::move(next);
    if (stop) {
      done = true;
      break;
    }
  }
  if (!done) throw NotStabilizable("lqr_synthesize: Riccati iteration did not converge");
  LinearFeedbackd K{(R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A)};
  if (spectral_radius(A - B * K.K) >= 1.0) throw NotStabilizable("lqr_synthesize: closed loop is not Schur stable");
  if (P_out) *P_out = P;
  return K;
}

std::optional<HinfDesign> hinf_at(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                                  double gamma, const RiccatiOptions& opt) {
  check_shapes(A, B, Q, R);
  require(gamma > 0.0, "hinf_at: gamma must be positive");
  const Index n = A.rows();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const double inv_g2 = 1.0 / (gamma * gamma);
  const MatrixXd BRB = B * R.ldlt().solve(B.transpose());
  const MatrixXd shift = BRB - inv_g2 * I;

  auto admissible = [&](const MatrixXd& P) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(I - inv_g2 * P);
    return es.eigenvalues().minCoeff() > 0.0;
  };

  MatrixXd P = Q;
  bool done = false;
  for (long it = 0; it < opt.max_iters; ++it) {
    if (!admissible(P)) return std::nullopt;
    const MatrixXd Lambda = I + shift * P;
    Eigen::PartialPivLU<MatrixXd> lu(Lambda);
    if (std::abs(lu.determinant()) < 1e-300) return std::nullopt;
    MatrixXd next = Q + A.transpose() * P * lu.solve(A);
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) return std::nullopt;
    const bool stop = converged(next, P, opt.rel_tol);
    P = std::move(next);
    if (stop) {
      done = true;
      break;
    }
  }
  if (!done || !admissible(P)) return std::nullopt;

  const MatrixXd Lambda = I + shift * P;
  HinfDesign d;
  d.gamma = gamma;
  d.P = P;
  d.feedback.K = R.ldlt().solve(B.transpose() * P * Lambda.partialPivLu().solve(A));
  if (spectral_radius(A - B * d.feedback.K) >= 1.0) return std::nullopt;
  return d;
}

HinfDesign hinf_synthesize(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R, double gamma_lo,
                           double gamma_hi, double gamma_tol, const RiccatiOptions& opt) {
  require(0.0 < gamma_lo && gamma_lo <= gamma_hi, "hinf_synthesize: need 0 < gamma_lo <= gamma_hi");
  auto best = hinf_at(A, B, Q, R, gamma_hi, opt);
  if (!best) throw InfeasibleDesign(gamma_lo, gamma_hi);
  if (auto at_lo = hinf_at(A, B, Q, R, gamma_lo, opt)) return *at_lo;
  double lo = gamma_lo, hi = gamma_hi;
  while (hi - lo > gamma_tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto d = hinf_at(A, B, Q, R, mid, opt)) {
      hi = mid;
      best = std::move(d);
    } else {
      lo = mid;
    }
  }
  return *best;
}

}  // namespace mactl
