#pragma once

#include <iosfwd>
#include <variant>

#include "mactl/disturbance.hpp"
#include "mactl/linear_system.hpp"

namespace mactl {

/// Window (s_{t-1}, s_{t-2}, ..., s_{t-m}) of a time-indexed signal stacked most
/// recent first. Entries with negative time index are zero.
template <typename Scalar>
Vector<Scalar> stack_window(const Trajectory<Scalar>& signal, long t, int m, Index dim) {
  Vector<Scalar> out = Vector<Scalar>::Zero(static_cast<Index>(m) * dim);
  for (int j = 1; j <= m; ++j) {
    const long s = t - j;
    if (s < 0) break;
    require(static_cast<std::size_t>(s) < signal.size(), "stack_window: signal too short for window");
    require(signal[static_cast<std::size_t>(s)].size() == dim, "stack_window: signal dimension mismatch");
    out.segment(static_cast<Index>(j - 1) * dim, dim) = signal[static_cast<std::size_t>(s)];
  }
  return out;
}

/// Disturbance-action controller u_t = M (w_{t-1}, ..., w_{t-m}).
template <typename Scalar>
struct DacPolicy {
  Matrix<Scalar> M;  // d_u x (m d_x)
  int m = 1;

  DacPolicy() = default;
  DacPolicy(Matrix<Scalar> M_, int m_) : M(std::move(M_)), m(m_) {
    require(m >= 1, "DacPolicy: window length must be at least 1");
    require(M.cols() % m == 0, "DacPolicy: M must have m * d_x columns");
  }
  static DacPolicy zero(Index du, Index dx, int m) { return DacPolicy(Matrix<Scalar>::Zero(du, m * dx), m); }

  Index signal_dim() const { return M.cols() / m; }
  Index input_dim() const { return M.rows(); }
  bool within(Scalar radius) const { return M.norm() <= radius; }
};

/// Disturbance-response controller u_t = M (y^nat_{t-1}, ..., y^nat_{t-m}).
template <typename Scalar>
struct DrcPolicy {
  Matrix<Scalar> M;  // d_u x (m d_y)
  int m = 1;

  DrcPolicy() = default;
  DrcPolicy(Matrix<Scalar> M_, int m_) : M(std::move(M_)), m(m_) {
    require(m >= 1, "DrcPolicy: window length must be at least 1");
    require(M.cols() % m == 0, "DrcPolicy: M must have m * d_y columns");
  }
  static DrcPolicy zero(Index du, Index dy, int m) { return DrcPolicy(Matrix<Scalar>::Zero(du, m * dy), m); }

  Index signal_dim() const { return M.cols() / m; }
  Index input_dim() const { return M.rows(); }
  bool within(Scalar radius) const { return M.norm() <= radius; }
};

template <typename Scalar, typename W>
Vector<Scalar> dac_control(const DacPolicy<Scalar>& p, const Eigen::MatrixBase<W>& window) {
  require(window.size() == p.M.cols(), "dac_control: window dimension mismatch");
  return p.M * window;
}

/// DAC control at time t from a disturbance trace (zero-padded for t <= m).
template <typename Scalar>
Vector<Scalar> dac_control(const DacPolicy<Scalar>& p, const Trajectory<Scalar>& w, long t) {
  return p.M * stack_window(w, t, p.m, p.signal_dim());
}

template <typename Scalar, typename Y>
Vector<Scalar> drc_control(const DrcPolicy<Scalar>& p, const Eigen::MatrixBase<Y>& ynat_window) {
  require(ynat_window.size() == p.M.cols(), "drc_control: window dimension mismatch");
  return p.M * ynat_window;
}

template <typename Scalar>
Vector<Scalar> drc_control(const DrcPolicy<Scalar>& p, const Trajectory<Scalar>& ynat, long t) {
  return p.M * stack_window(ynat, t, p.m, p.signal_dim());
}

/// u = -K x.
template <typename Scalar>
struct LinearFeedback {
  Matrix<Scalar> K;  // d_u x d_x
};

template <typename Scalar, typename X>
Vector<Scalar> feedback_control(const LinearFeedback<Scalar>& f, const Eigen::MatrixBase<X>& x) {
  require(x.size() == f.K.cols(), "feedback_control: state dimension mismatch");
  return -(f.K * x);
}

/// Fixed control schedule; zero after the schedule runs out.
template <typename Scalar>
struct OpenLoopPolicy {
  Trajectory<Scalar> schedule;
  Index dim = 0;

  Vector<Scalar> control(long t) const {
    if (t >= 0 && static_cast<std::size_t>(t) < schedule.size()) return schedule[static_cast<std::size_t>(t)];
    return Vector<Scalar>::Zero(dim);
  }
};

/// Linear dynamic controller s_{t+1} = A s_t + B x_t, u_t = C s_t + D x_t.
/// Comparator/reference class only; not trained.
template <typename Scalar>
struct LdcPolicy {
  Matrix<Scalar> A, B, C, D;
  Vector<Scalar> s;

  /// Emits u_t for input x_t and advances the internal state.
  template <typename X>
  Vector<Scalar> step(const Eigen::MatrixBase<X>& x) {
    require(x.size() == B.cols() && x.size() == D.cols(), "LdcPolicy: input dimension mismatch");
    Vector<Scalar> u = C * s + D * x;
    s = A * s + B * x;
    return u;
  }
};

using DacPolicyd = DacPolicy<double>;
using DrcPolicyd = DrcPolicy<double>;
using LinearFeedbackd = LinearFeedback<double>;
using OpenLoopPolicyd = OpenLoopPolicy<double>;
using LdcPolicyd = LdcPolicy<double>;

/// Per-agent policy for joint simulation. Feedback policies read the raw state;
/// DAC reads w; DRC reads the agent's Nature's y.
using AgentPolicy = std::variant<DacPolicyd, DrcPolicyd, LinearFeedbackd, OpenLoopPolicyd>;

struct JointRollout {
  Trajectoryd x;                         // x_0 .. x_T
  std::vector<Trajectoryd> agent_controls;  // [agent][t]
};

/// Simulates x_{t+1} = A x_t + B u_t + w_t from x_0 = 0 with each agent
/// playing its own policy. DAC and DRC agents are handed their disturbance
/// representation (w, resp. C_i x^nat + e_i) directly.
JointRollout simulate_policies(const LinearSystemd& sys, const std::vector<AgentPolicy>& policies,
                               const DisturbanceTrace& trace);

/// Replays the joint system twice, once with agent `varied` playing
/// `alternative`, and reports whether every other agent's control sequence is
/// bit-identical across the two runs.
bool decoupling_check(const std::vector<AgentPolicy>& policies, std::size_t varied, const AgentPolicy& alternative,
                      const LinearSystemd& sys, const DisturbanceTrace& trace);

/// Text matrix format:
///
///   matrix <rows> <cols>
///   <row 0, space separated, %.17g>
///   ...
void write_matrix(std::ostream& os, const MatrixXd& M);
MatrixXd read_matrix(std::istream& is);

}  // namespace mactl
