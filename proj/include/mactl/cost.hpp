#pragma once

#include <map>

#include "mactl/types.hpp"

namespace mactl {

/// c(x, u) = x'Qx + 2 x'Nu + u'Ru.
///
/// The cross term N is zero for plain state/input penalties; it appears when a
/// cost on the raw plant is rewritten for a plant wrapped by a feedback gain.
template <typename Scalar>
struct QuadCost {
  Matrix<Scalar> Q;
  Matrix<Scalar> R;
  Matrix<Scalar> N;

  QuadCost() = default;
  QuadCost(Matrix<Scalar> Q_, Matrix<Scalar> R_)
      : QuadCost(std::move(Q_), std::move(R_), Matrix<Scalar>()) {}
  QuadCost(Matrix<Scalar> Q_, Matrix<Scalar> R_, Matrix<Scalar> N_)
      : Q(std::move(Q_)), R(std::move(R_)), N(std::move(N_)) {
    require(Q.rows() == Q.cols() && R.rows() == R.cols(), "QuadCost: Q and R must be square");
    if (N.size() == 0) N = Matrix<Scalar>::Zero(Q.rows(), R.rows());
    require(N.rows() == Q.rows() && N.cols() == R.rows(), "QuadCost: N must be d_x x d_u");
  }

  static QuadCost identity(Index dx, Index du, Scalar q = Scalar(1), Scalar r = Scalar(1)) {
    return QuadCost(q * Matrix<Scalar>::Identity(dx, dx), r * Matrix<Scalar>::Identity(du, du));
  }

  Index state_dim() const { return Q.rows(); }
  Index input_dim() const { return R.rows(); }

  template <typename X, typename U>
  Scalar operator()(const Eigen::MatrixBase<X>& x, const Eigen::MatrixBase<U>& u) const {
    require(x.size() == Q.rows() && u.size() == R.rows(), "QuadCost: argument dimension mismatch");
    return x.dot(Q * x) + Scalar(2) * x.dot(N * u) + u.dot(R * u);
  }

  template <typename X, typename U>
  Vector<Scalar> grad_x(const Eigen::MatrixBase<X>& x, const Eigen::MatrixBase<U>& u) const {
    return Scalar(2) * (Q * x + N * u);
  }
  template <typename X, typename U>
  Vector<Scalar> grad_u(const Eigen::MatrixBase<X>& x, const Eigen::MatrixBase<U>& u) const {
    return Scalar(2) * (R * u + N.transpose() * x);
  }

  /// C with 0 <= c(x,u) <= C D^2 whenever |x|,|u| <= D (the joint Hessian's top eigenvalue, doubled
  /// to account for |(x,u)|^2 <= 2D^2). Reduces to lambda_max(Q) + lambda_max(R) when N = 0.
  Scalar bound_constant() const {
    if (N.isZero(0)) {
      Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> q(Q), r(R);
      return q.eigenvalues().maxCoeff() + r.eigenvalues().maxCoeff();
    }
    Matrix<Scalar> H(Q.rows() + R.rows(), Q.rows() + R.rows());
    H << Q, N, N.transpose(), R;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(H);
    return Scalar(2) * es.eigenvalues().maxCoeff();
  }

  /// True when the joint quadratic form is positive semidefinite (so c >= 0 and convex).
  bool is_psd(Scalar tol = Scalar(1e-10)) const {
    Matrix<Scalar> H(Q.rows() + R.rows(), Q.rows() + R.rows());
    H << Q, N, N.transpose(), R;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(Scalar(0.5) * (H + H.transpose()));
    return es.eigenvalues().minCoeff() >= -tol;
  }
};

using QuadCostd = QuadCost<double>;

/// Per-step cost: a base cost with optional overrides at specific steps.
struct CostSchedule {
  QuadCostd base;
  std::map<long, QuadCostd> overrides;

  const QuadCostd& at(long t) const {
    auto it = overrides.find(t);
    return it == overrides.end() ? base : it->second;
  }
};

}  // namespace mactl
