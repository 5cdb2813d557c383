#pragma once

#include <optional>
#include <utility>

#include "mactl/types.hpp"

namespace mactl {

/// Discrete-time LTI plant shared by k agents:
///
///   x_{t+1} = A x_t + sum_i B_i u^i_t + w_t,    y^i_t = C_i x_t + e^i_t.
///
/// Agent i owns the input block B_i (d_x x d_{u_i}). Observation maps are
/// optional; an agent without one observes the full state. Dimensions are fixed
/// at construction.
template <typename Scalar>
class LinearSystem {
public:
  using MatrixType = Matrix<Scalar>;
  using VectorType = Vector<Scalar>;

  LinearSystem(MatrixType A, std::vector<MatrixType> B_blocks,
               std::vector<std::optional<MatrixType>> C_blocks = {})
      : A_(std::move(A)), B_blocks_(std::move(B_blocks)), C_blocks_(std::move(C_blocks)) {
    require(A_.rows() == A_.cols(), "LinearSystem: A must be square");
    require(!B_blocks_.empty(), "LinearSystem: at least one agent input block is required");
    if (C_blocks_.empty()) C_blocks_.resize(B_blocks_.size());
    require(C_blocks_.size() == B_blocks_.size(),
            "LinearSystem: need one (possibly empty) observation map per agent");

    Index cols = 0;
    offsets_.reserve(B_blocks_.size() + 1);
    offsets_.push_back(0);
    for (const auto& Bi : B_blocks_) {
      require(Bi.rows() == A_.rows(), "LinearSystem: every B_i needs d_x rows");
      cols += Bi.cols();
      offsets_.push_back(cols);
    }
    B_.resize(A_.rows(), cols);
    for (std::size_t i = 0; i < B_blocks_.size(); ++i)
      B_.middleCols(offsets_[i], B_blocks_[i].cols()) = B_blocks_[i];

    for (const auto& Ci : C_blocks_)
      if (Ci) require(Ci->cols() == A_.rows(), "LinearSystem: every C_i needs d_x columns");
  }

  /// Single-agent convenience: one input block holding all of B.
  static LinearSystem single(MatrixType A, MatrixType B) {
    return LinearSystem(std::move(A), std::vector<MatrixType>{std::move(B)});
  }

  /// Splits the columns of B into blocks of the given widths.
  static LinearSystem split(MatrixType A, const MatrixType& B, const std::vector<Index>& widths) {
    std::vector<MatrixType> blocks;
    Index col = 0;
    for (Index w : widths) {
      require(w > 0 && col + w <= B.cols(), "LinearSystem::split: widths exceed B");
      blocks.push_back(B.middleCols(col, w));
      col += w;
    }
    require(col == B.cols(), "LinearSystem::split: widths must cover B exactly");
    return LinearSystem(std::move(A), std::move(blocks));
  }

  const MatrixType& A() const { return A_; }
  const MatrixType& B() const { return B_; }
  const MatrixType& B(std::size_t agent) const { return B_blocks_.at(agent); }
  const std::vector<MatrixType>& B_blocks() const { return B_blocks_; }

  bool fully_observed(std::size_t agent) const { return !C_blocks_.at(agent).has_value(); }
  /// Observation map of an agent; identity for fully observed agents.
  MatrixType C(std::size_t agent) const {
    const auto& Ci = C_blocks_.at(agent);
    return Ci ? *Ci : MatrixType::Identity(state_dim(), state_dim());
  }
  const std::vector<std::optional<MatrixType>>& C_blocks() const { return C_blocks_; }

  Index state_dim() const { return A_.rows(); }
  Index input_dim() const { return B_.cols(); }
  Index input_dim(std::size_t agent) const { return B_blocks_.at(agent).cols(); }
  Index obs_dim(std::size_t agent) const {
    const auto& Ci = C_blocks_.at(agent);
    return Ci ? Ci->rows() : state_dim();
  }
  std::size_t num_agents() const { return B_blocks_.size(); }
  /// Column offset of agent i's block inside the joint control vector.
  Index input_offset(std::size_t agent) const { return offsets_.at(agent); }

  /// Same plant with a different transition matrix (used for closed loops).
  LinearSystem with_A(MatrixType A) const { return LinearSystem(std::move(A), B_blocks_, C_blocks_); }

  template <typename Other>
  LinearSystem<Other> cast() const {
    std::vector<Matrix<Other>> Bs;
    std::vector<std::optional<Matrix<Other>>> Cs;
    for (const auto& Bi : B_blocks_) Bs.push_back(Bi.template cast<Other>());
    for (const auto& Ci : C_blocks_)
      Cs.push_back(Ci ? std::optional<Matrix<Other>>(Ci->template cast<Other>()) : std::nullopt);
    return LinearSystem<Other>(A_.template cast<Other>(), std::move(Bs), std::move(Cs));
  }

private:
  MatrixType A_;
  std::vector<MatrixType> B_blocks_;
  std::vector<std::optional<MatrixType>> C_blocks_;
  MatrixType B_;
  std::vector<Index> offsets_;
};

using LinearSystemd = LinearSystem<double>;

/// A x + B u + w.
template <typename Scalar, typename X, typename U, typename W>
Vector<Scalar> step_dynamics(const LinearSystem<Scalar>& sys, const Eigen::MatrixBase<X>& x,
                             const Eigen::MatrixBase<U>& u, const Eigen::MatrixBase<W>& w) {
  require(x.size() == sys.state_dim() && w.size() == sys.state_dim(),
          "step_dynamics: state/disturbance dimension mismatch");
  require(u.size() == sys.input_dim(), "step_dynamics: joint control dimension mismatch");
  return sys.A() * x + sys.B() * u + w;
}

/// Nature's x: the zero-control state sequence x^nat_0 = 0, x^nat_{t+1} = A x^nat_t + w_t.
/// Returns T+1 states for a trace of T disturbances.
template <typename Scalar>
Trajectory<Scalar> natures_x(const LinearSystem<Scalar>& sys, const Trajectory<Scalar>& w) {
  Trajectory<Scalar> xs;
  xs.reserve(w.size() + 1);
  xs.push_back(Vector<Scalar>::Zero(sys.state_dim()));
  for (const auto& wt : w) {
    require(wt.size() == sys.state_dim(), "natures_x: disturbance dimension mismatch");
    xs.push_back(sys.A() * xs.back() + wt);
  }
  return xs;
}

/// Nature's y for one agent: y^nat_t = C_i x^nat_t + e_t. An empty observation
/// trace means e = 0.
template <typename Scalar>
Trajectory<Scalar> natures_y(const LinearSystem<Scalar>& sys, const Trajectory<Scalar>& w,
                             const Trajectory<Scalar>& e, std::size_t agent) {
  require(agent < sys.num_agents(), "natures_y: agent index out of range");
  const auto xs = natures_x(sys, w);
  const Matrix<Scalar> C = sys.C(agent);
  Trajectory<Scalar> ys;
  ys.reserve(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    Vector<Scalar> y = C * xs[t];
    if (t < e.size()) {
      require(e[t].size() == y.size(), "natures_y: observation noise dimension mismatch");
      y += e[t];
    }
    ys.push_back(std::move(y));
  }
  return ys;
}

/// Stacks per-agent controls into the joint control vector.
template <typename Scalar>
Vector<Scalar> join_controls(const LinearSystem<Scalar>& sys, const std::vector<Vector<Scalar>>& parts) {
  require(parts.size() == sys.num_agents(), "join_controls: need one control per agent");
  Vector<Scalar> u(sys.input_dim());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    require(parts[i].size() == sys.input_dim(i), "join_controls: agent control dimension mismatch");
    u.segment(sys.input_offset(i), sys.input_dim(i)) = parts[i];
  }
  return u;
}

/// The ADMIRE overactuated aircraft model: five states (angle of attack,
/// sideslip, roll/pitch/yaw rates) and four scalar actuators.
inline LinearSystemd admire_system() {
  MatrixXd A(5, 5);
  A << 1.5109, 0.0084, 0.0009, 0.8598, -0.0043,
       0, -0.0295, 0.0903, 0, -0.4500,
       0, -3.1070, -0.1427, 0, 2.7006,
       2.3057, 0.0097, 0.0006, 1.5439, -0.0029,
       0, 0.5000, 0.0125, 0, 0.4878;
  MatrixXd B(5, 4);
  B << 0.6981, -0.5388, -0.5367, 0.0029,
       0, -0.2031, 0.2031, 0.3912,
       0, -2.0768, 2.0768, -0.4667,
       1.8415, -1.4190, -1.4190, 0.0035,
       0, -0.1854, 0.1854, -0.7047;
  return LinearSystemd::split(std::move(A), B, {1, 1, 1, 1});
}

}  // namespace mactl
