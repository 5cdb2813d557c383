#pragma once

#include <optional>

#include "mactl/linear_system.hpp"

namespace mactl {

/// Truncated Markov operator G = [B, AB, ..., A^{h-1}B], or [CB, CAB, ...,
/// CA^{h-1}B] for an observation map C. blocks[r] multiplies u_{t-1-r}, so
///
///   x_t ~ x^nat_t + sum_{r<h} blocks[r] u_{t-1-r}.
///
/// Agent views are the column slices aligned with the plant's input blocks.
template <typename Scalar>
struct MarkovOperator {
  std::vector<Matrix<Scalar>> blocks;
  std::vector<Index> offsets;  // agent column offsets, plus the total width at the end

  int horizon() const { return static_cast<int>(blocks.size()); }
  Index output_dim() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  Index input_dim() const { return offsets.back(); }
  std::size_t num_agents() const { return offsets.size() - 1; }
  Index agent_width(std::size_t i) const { return offsets.at(i + 1) - offsets.at(i); }

  /// Block r restricted to agent i's columns.
  auto agent_block(int r, std::size_t i) const {
    return blocks.at(static_cast<std::size_t>(r)).middleCols(offsets.at(i), agent_width(i));
  }

  /// sum_r blocks[r] u_{t-1-r} for controls ordered most recent first.
  Vector<Scalar> apply(const Trajectory<Scalar>& recent_first) const {
    require(recent_first.size() <= blocks.size(), "MarkovOperator::apply: more controls than blocks");
    Vector<Scalar> y = Vector<Scalar>::Zero(output_dim());
    for (std::size_t r = 0; r < recent_first.size(); ++r) y += blocks[r] * recent_first[r];
    return y;
  }

  /// Contribution of agent i's controls alone (most recent first).
  Vector<Scalar> apply_agent(std::size_t i, const Trajectory<Scalar>& recent_first) const {
    require(recent_first.size() <= blocks.size(), "MarkovOperator::apply_agent: more controls than blocks");
    Vector<Scalar> y = Vector<Scalar>::Zero(output_dim());
    for (std::size_t r = 0; r < recent_first.size(); ++r)
      y += agent_block(static_cast<int>(r), i) * recent_first[r];
    return y;
  }
};

using MarkovOperatord = MarkovOperator<double>;

/// Builds the operator by repeated multiplication with A.
template <typename Scalar>
MarkovOperator<Scalar> build_markov(const LinearSystem<Scalar>& sys, int h,
                                    const std::optional<Matrix<Scalar>>& C = std::nullopt) {
  require(h >= 1, "build_markov: horizon must be at least 1");
  if (C) require(C->cols() == sys.state_dim(), "build_markov: C must have d_x columns");
  MarkovOperator<Scalar> G;
  Matrix<Scalar> power_times_B = sys.B();
  for (int r = 0; r < h; ++r) {
    G.blocks.push_back(C ? Matrix<Scalar>(*C * power_times_B) : power_times_B);
    power_times_B = sys.A() * power_times_B;
  }
  for (std::size_t i = 0; i < sys.num_agents(); ++i) G.offsets.push_back(sys.input_offset(i));
  G.offsets.push_back(sys.input_dim());
  return G;
}

/// w_t = x_{t+1} - A x_t - B u_t.
template <typename Scalar, typename X, typename U, typename Xn>
Vector<Scalar> recover_disturbance(const LinearSystem<Scalar>& sys, const Eigen::MatrixBase<X>& x,
                                   const Eigen::MatrixBase<U>& u, const Eigen::MatrixBase<Xn>& x_next) {
  require(x.size() == sys.state_dim() && x_next.size() == sys.state_dim(),
          "recover_disturbance: state dimension mismatch");
  require(u.size() == sys.input_dim(), "recover_disturbance: control dimension mismatch");
  return x_next - sys.A() * x - sys.B() * u;
}

/// y^nat_t ~ y_t - sum_{r<h} G_r u_{t-1-r} using the joint control history
/// u_0..u_{t-1}; controls before time 0 are zero.
template <typename Scalar>
Vector<Scalar> estimate_natures_y(const Trajectory<Scalar>& y_history, const Trajectory<Scalar>& u_history,
                                  const MarkovOperator<Scalar>& G, long t) {
  require(t >= 0 && static_cast<std::size_t>(t) < y_history.size(),
          "estimate_natures_y: insufficient observation history");
  require(u_history.size() >= static_cast<std::size_t>(t), "estimate_natures_y: insufficient control history");
  Vector<Scalar> y = y_history[static_cast<std::size_t>(t)];
  require(y.size() == G.output_dim(), "estimate_natures_y: observation dimension mismatch");
  for (int r = 0; r < G.horizon(); ++r) {
    const long s = t - 1 - r;
    if (s < 0) break;
    y -= G.blocks[static_cast<std::size_t>(r)] * u_history[static_cast<std::size_t>(s)];
  }
  return y;
}

}  // namespace mactl
