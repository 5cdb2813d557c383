#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "mactl/types.hpp"

namespace mactl {

/// Frobenius ball {X : |X|_F <= radius} over rows x cols matrices (vectors are n x 1).
struct BallDomain {
  double radius = 1.0;
  Index rows = 1;
  Index cols = 1;

  BallDomain() = default;
  BallDomain(double r, Index rows_, Index cols_ = 1);

  Index size() const { return rows * cols; }
  bool contains(const MatrixXd& x, double tol = 1e-12) const;
  /// Nearest point of the ball; points already inside are returned unchanged.
  MatrixXd project(const MatrixXd& x) const;
};

/// eta_t as a function of the learner's round counter t >= 1.
struct StepSchedule {
  enum class Kind {
    constant,     // eta
    inv_t,        // eta / (t + offset)
    inv_sqrt_t,   // eta / sqrt(t + offset)
    anytime_ogd,  // D / (G sqrt(t)) with D = 2R and G the running max gradient norm
  };
  Kind kind = Kind::anytime_ogd;
  double scale = 1.0;
  long offset = 0;

  static StepSchedule constant(double eta) { return {Kind::constant, eta, 0}; }
  static StepSchedule inv_t(double eta, long offset = 0) { return {Kind::inv_t, eta, offset}; }
  static StepSchedule inv_sqrt_t(double eta, long offset = 0) { return {Kind::inv_sqrt_t, eta, offset}; }
  static StepSchedule anytime() { return {Kind::anytime_ogd, 1.0, 0}; }

  double operator()(long t, double max_grad_norm, double diameter) const;
};

/// Running sums that evaluate the linear-loss regret of a learner against any
/// fixed comparator without storing the history.
///
///   linear(z) = sum_t <g_t, x_t - z>                      (what OGD controls)
///   memory(z) = sum_t <G_t, x_{t-h:t} - (z, ..., z)>      (window form)
///
/// where g_t is the block sum of the window gradient G_t.
struct RegretLedger {
  MatrixXd gradient_sum;
  double played_inner = 0.0;  // sum_t <g_t, x_t>
  double window_inner = 0.0;  // sum_t <G_t, x_{t-h:t}>
  long rounds = 0;

  void record(const MatrixXd& g, const MatrixXd& played, double window_term);
  double linear_regret(const MatrixXd& comparator) const;
  double memory_regret(const MatrixXd& comparator) const;
};

/// Online gradient descent learner over a ball.
struct LearnerState {
  BallDomain domain;
  MatrixXd iterate;
  StepSchedule schedule;
  long t = 0;
  double max_grad_norm = 0.0;
  RegretLedger ledger;

  LearnerState() = default;
  LearnerState(BallDomain d, StepSchedule s);
  LearnerState(BallDomain d, StepSchedule s, MatrixXd start);
};

/// One OGD update on the linear loss <g, .>: iterate <- P(iterate - eta_t g).
/// `window_term` is <G_t, x_{t-h:t}> for the memory ledger; it defaults to
/// <g, iterate> (no memory).
LearnerState ogd_step(LearnerState state, const MatrixXd& g, std::optional<double> window_term = std::nullopt);

/// Joint decision x_t = (x^1_t, ..., x^k_t).
struct JointDecision {
  std::vector<MatrixXd> parts;

  std::size_t num_agents() const { return parts.size(); }
  Index dim() const;
  VectorXd concat() const;
  std::vector<Index> offsets() const;
};

JointDecision split_decision(const VectorXd& joint, const std::vector<LearnerState>& shapes);

/// Returns, for each agent, the gradient of l^i_t = l_t(., x^{-i}_t) at x^i_t.
using LocalGradientOracle = std::function<std::vector<MatrixXd>(const JointDecision&)>;

/// Multiplayer OCO round (linearized reduction): every learner commits, then
/// receives only its own linear loss <g^i_t, .>. Returns the committed decision.
JointDecision multiplayer_oco_round(std::vector<LearnerState>& learners, const LocalGradientOracle& oracle);

/// Rolling window of the last h+1 joint decisions, oldest first.
class DecisionWindow {
public:
  explicit DecisionWindow(int h) : h_(h) { require(h >= 0, "DecisionWindow: h must be nonnegative"); }

  int memory() const { return h_; }
  std::size_t size() const { return window_.size(); }
  bool full() const { return window_.size() == static_cast<std::size_t>(h_) + 1; }
  void push(JointDecision x);
  /// Fills missing history slots with copies of x (decisions before round 1).
  void pad_with(const JointDecision& x);
  const std::deque<JointDecision>& decisions() const { return window_; }

private:
  int h_;
  std::deque<JointDecision> window_;
};

/// For each agent, the h+1 window blocks of grad l^i_t at x^i_{t-h:t}, oldest first.
using WindowGradientOracle =
    std::function<std::vector<std::vector<MatrixXd>>(const std::deque<JointDecision>&)>;

/// Multiplayer OCO with memory: learners commit x_t, the window becomes
/// x_{t-h:t}, and each learner is fed <sum_r G^i_{t,r}, .>, the gradient of its
/// loss along repeated copies of its own decision.
JointDecision multiplayer_ocom_round(std::vector<LearnerState>& learners, DecisionWindow& window,
                                     const WindowGradientOracle& oracle);

/// Smooth objective over a flattened joint decision.
struct Objective {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
};

/// Product of balls with agent offsets in the flattened joint vector.
struct ProductDomain {
  std::vector<BallDomain> balls;

  Index dim() const;
  VectorXd project(const VectorXd& x) const;
  bool contains(const VectorXd& x, double tol = 1e-12) const;
};

ProductDomain product_domain(const std::vector<LearnerState>& learners);

struct MinimizationResult {
  VectorXd argmin;
  double value = 0.0;
  double residual = 0.0;  // projected-gradient residual at argmin
  bool converged = false;
  long iterations = 0;
};

/// Projected gradient descent with backtracking; stops when the projected
/// gradient residual drops below tol.
MinimizationResult projected_gradient_descent(const Objective& f, const ProductDomain& domain,
                                              VectorXd start, long max_iters = 10000, double tol = 1e-8);

/// Best fixed joint decision in hindsight: exhaustive grid (resolution
/// `grid_step`) when the joint dimension is at most 2, polished by projected
/// gradient descent; projected gradient descent alone otherwise.
MinimizationResult best_in_hindsight(const Objective& f, const ProductDomain& domain, double grid_step = 1e-3,
                                     long max_iters = 10000, double tol = 1e-8);

/// Loss with memory on flattened joint decisions; window is oldest first.
struct MemoryLoss {
  std::function<double(const std::vector<VectorXd>&)> value;
  /// Joint gradient, one block per window slot.
  std::function<std::vector<VectorXd>(const std::vector<VectorXd>&)> gradient;
};

/// l(z) = 0.5 z'Pz + q'z + c over the stacked window z = (x_{t-h}, ..., x_t).
struct QuadraticMemoryLoss {
  MatrixXd P;
  VectorXd q;
  double c = 0.0;
  Index dim = 0;
  int h = 0;

  double operator()(const std::vector<VectorXd>& window) const;
  std::vector<VectorXd> gradient(const std::vector<VectorXd>& window) const;
  MemoryLoss as_memory_loss() const;
  /// l(x, ..., x) as (P, q, c) of a quadratic in x.
  QuadraticMemoryLoss collapsed() const;
};

/// Sum of the collapsed losses as an objective in x.
Objective collapsed_sum_objective(const std::vector<QuadraticMemoryLoss>& losses);

struct RegretReport {
  double average_regret = 0.0;
  double algorithm_loss = 0.0;   // sum_t l_t(x_{t-h:t})
  double comparator_loss = 0.0;  // min_x sum_t l_t(x, ..., x)
  VectorXd comparator;
  bool converged = true;
  double residual = 0.0;
};

using ComparatorOracle = std::function<MinimizationResult(const Objective&)>;

/// Average multi-agent regret with memory h. Decisions before the first round
/// are taken equal to decisions[0].
RegretReport eval_multiagent_regret(const std::vector<MemoryLoss>& losses,
                                    const std::vector<JointDecision>& decisions, int h,
                                    const Objective& collapsed_sum, const ComparatorOracle& oracle);

/// The window x_{t-h:t} (oldest first, padded with decisions[0]) as flattened vectors.
std::vector<VectorXd> window_at(const std::vector<JointDecision>& decisions, std::size_t t, int h);

}  // namespace mactl
