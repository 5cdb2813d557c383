#include "mactl/oco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mactl {

BallDomain::BallDomain(double r, Index rows_, Index cols_) : radius(r), rows(rows_), cols(cols_) {
  require(r > 0.0, "BallDomain: radius must be positive");
  require(rows_ > 0 && cols_ > 0, "BallDomain: shape must be nonempty");
}

bool BallDomain::contains(const MatrixXd& x, double tol) const {
  return x.rows() == rows && x.cols() == cols && x.norm() <= radius * (1.0 + tol);
}

MatrixXd BallDomain::project(const MatrixXd& x) const {
  require(x.rows() == rows && x.cols() == cols, "BallDomain::project: shape mismatch");
  const double n = x.norm();
  if (n <= radius) return x;
  return x * (radius / n);
}

double StepSchedule::operator()(long t, double max_grad_norm, double diameter) const {
  require(t >= 1, "StepSchedule: rounds are counted from 1");
  const double tt = static_cast<double>(t + offset);
  switch (kind) {
    case Kind::constant: return scale;
    case Kind::inv_t: return scale / tt;
    case Kind::inv_sqrt_t: return scale / std::sqrt(tt);
    case Kind::anytime_ogd:
      if (max_grad_norm <= 0.0) return 0.0;
      return scale * diameter / (max_grad_norm * std::sqrt(static_cast<double>(t)));
  }
  return 0.0;
}

void RegretLedger::record(const MatrixXd& g, const MatrixXd& played, double window_term) {
  if (gradient_sum.size() == 0) gradient_sum = MatrixXd::Zero(g.rows(), g.cols());
  gradient_sum += g;
  played_inner += (g.array() * played.array()).sum();
  window_inner += window_term;
  ++rounds;
}

double RegretLedger::linear_regret(const MatrixXd& comparator) const {
  if (rounds == 0) return 0.0;
  return played_inner - (gradient_sum.array() * comparator.array()).sum();
}

double RegretLedger::memory_regret(const MatrixXd& comparator) const {
  if (rounds == 0) return 0.0;
  return window_inner - (gradient_sum.array() * comparator.array()).sum();
}

LearnerState::LearnerState(BallDomain d, StepSchedule s)
    : LearnerState(d, s, MatrixXd::Zero(d.rows, d.cols)) {}

LearnerState::LearnerState(BallDomain d, StepSchedule s, MatrixXd start)
    : domain(d), iterate(d.project(start)), schedule(s) {}

LearnerState ogd_step(LearnerState state, const MatrixXd& g, std::optional<double> window_term) {
  require(g.rows() == state.domain.rows && g.cols() == state.domain.cols, "ogd_step: gradient shape mismatch");
  require(g.allFinite(), "ogd_step: gradient has non-finite entries");
  state.t += 1;
  state.max_grad_norm = std::max(state.max_grad_norm, g.norm());
  const double eta = state.schedule(state.t, state.max_grad_norm, 2.0 * state.domain.radius);
  const double inner = window_term ? *window_term : (g.array() * state.iterate.array()).sum();
  state.ledger.record(g, state.iterate, inner);
  if (eta != 0.0) state.iterate = state.domain.project(state.iterate - eta * g);
  return state;
}

Index JointDecision::dim() const {
  Index d = 0;
  for (const auto& p : parts) d += p.size();
  return d;
}

VectorXd JointDecision::concat() const {
  VectorXd v(dim());
  Index off = 0;
  for (const auto& p : parts) {
    v.segment(off, p.size()) = p.reshaped();
    off += p.size();
  }
  return v;
}

std::vector<Index> JointDecision::offsets() const {
  std::vector<Index> off{0};
  for (const auto& p : parts) off.push_back(off.back() + p.size());
  return off;
}

JointDecision split_decision(const VectorXd& joint, const std::vector<LearnerState>& shapes) {
  JointDecision x;
  Index off = 0;
  for (const auto& s : shapes) {
    const Index n = s.domain.size();
    require(off + n <= joint.size(), "split_decision: joint vector too short");
    x.parts.push_back(joint.segment(off, n).reshaped(s.domain.rows, s.domain.cols));
    off += n;
  }
  require(off == joint.size(), "split_decision: joint vector too long");
  return x;
}

namespace {

JointDecision current_decision(const std::vector<LearnerState>& learners) {
  JointDecision x;
  x.parts.reserve(learners.size());
  for (const auto& l : learners) x.parts.push_back(l.iterate);
  return x;
}

double frob_inner(const MatrixXd& a, const MatrixXd& b) { return (a.array() * b.array()).sum(); }

}  // namespace

JointDecision multiplayer_oco_round(std::vector<LearnerState>& learners, const LocalGradientOracle& oracle) {
  JointDecision x = current_decision(learners);
  const auto grads = oracle(x);
  require(grads.size() == learners.size(), "multiplayer_oco_round: oracle must return one gradient per agent");
  for (std::size_t i = 0; i < learners.size(); ++i) learners[i] = ogd_step(std::move(learners[i]), grads[i]);
  return x;
}

void DecisionWindow::push(JointDecision x) {
  window_.push_back(std::move(x));
  while (window_.size() > static_cast<std::size_t>(h_) + 1) window_.pop_front();
}

void DecisionWindow::pad_with(const JointDecision& x) {
  while (window_.size() < static_cast<std::size_t>(h_)) window_.push_front(x);
}

JointDecision multiplayer_ocom_round(std::vector<LearnerState>& learners, DecisionWindow& window,
                                     const WindowGradientOracle& oracle) {
  JointDecision x = current_decision(learners);
  window.push(x);
  require(window.full(), "multiplayer_ocom_round: window shorter than h+1");
  const auto grads = oracle(window.decisions());
  require(grads.size() == learners.size(), "multiplayer_ocom_round: oracle must return one gradient per agent");
  const auto& slots = window.decisions();
  for (std::size_t i = 0; i < learners.size(); ++i) {
    require(grads[i].size() == slots.size(), "multiplayer_ocom_round: need h+1 gradient blocks per agent");
    MatrixXd summed = MatrixXd::Zero(learners[i].domain.rows, learners[i].domain.cols);
    double window_term = 0.0;
    for (std::size_t r = 0; r < slots.size(); ++r) {
      summed += grads[i][r];
      window_term += frob_inner(grads[i][r], slots[r].parts[i]);
    }
    learners[i] = ogd_step(std::move(learners[i]), summed, window_term);
  }
  return x;
}

Index ProductDomain::dim() const {
  Index d = 0;
  for (const auto& b : balls) d += b.size();
  return d;
}

VectorXd ProductDomain::project(const VectorXd& x) const {
  require(x.size() == dim(), "ProductDomain::project: dimension mismatch");
  VectorXd out(x.size());
  Index off = 0;
  for (const auto& b : balls) {
    const Index n = b.size();
    const double norm = x.segment(off, n).norm();
    out.segment(off, n) = norm <= b.radius ? x.segment(off, n) : VectorXd(x.segment(off, n) * (b.radius / norm));
    off += n;
  }
  return out;
}

bool ProductDomain::contains(const VectorXd& x, double tol) const {
  if (x.size() != dim()) return false;
  Index off = 0;
  for (const auto& b : balls) {
    if (x.segment(off, b.size()).norm() > b.radius * (1.0 + tol)) return false;
    off += b.size();
  }
  return true;
}

ProductDomain product_domain(const std::vector<LearnerState>& learners) {
  ProductDomain d;
  for (const auto& l : learners) d.balls.push_back(l.domain);
  return d;
}

MinimizationResult projected_gradient_descent(const Objective& f, const ProductDomain& domain, VectorXd start,
                                              long max_iters, double tol) {
  MinimizationResult res;
  VectorXd x = domain.project(start);
  double fx = f.value(x);
  double step = 1.0;
  for (long it = 0; it < max_iters; ++it) {
    const VectorXd g = f.gradient(x);
    VectorXd next;
    double fnext = 0.0;
    // Backtrack until the quadratic upper model holds.
    for (int bt = 0; bt < 200; ++bt) {
      next = domain.project(x - step * g);
      fnext = f.value(next);
      const VectorXd d = next - x;
      if (fnext <= fx + g.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-15 * std::abs(fx)) break;
      step *= 0.5;
    }
    const double residual = (next - x).norm() / step;
    x = std::move(next);
    fx = fnext;
    res.iterations = it + 1;
    res.residual = residual;
    if (residual <= tol) {
      res.converged = true;
      break;
    }
    step *= 2.0;
  }
  res.argmin = x;
  res.value = fx;
  if (!res.converged) {
    // Residual at the final point with a unit step, for reporting.
    res.residual = (x - domain.project(x - f.gradient(x))).norm();
    res.converged = res.residual <= tol;
  }
  return res;
}

MinimizationResult best_in_hindsight(const Objective& f, const ProductDomain& domain, double grid_step,
                                     long max_iters, double tol) {
  const Index n = domain.dim();
  if (n > 2) return projected_gradient_descent(f, domain, VectorXd::Zero(n), max_iters, tol);

  // Per-coordinate box [-R, R] of the ball each coordinate belongs to.
  VectorXd bound(n);
  Index off = 0;
  for (const auto& b : domain.balls) {
    bound.segment(off, b.size()).setConstant(b.radius);
    off += b.size();
  }
  // Keep the grid below ~4e6 points.
  double step = grid_step;
  auto points_per_axis = [&](Index i) { return static_cast<long>(std::floor(2.0 * bound(i) / step)) + 1; };
  long total = 1;
  for (Index i = 0; i < n; ++i) total *= points_per_axis(i);
  while (total > 4'000'000) {
    step *= 2.0;
    total = 1;
    for (Index i = 0; i < n; ++i) total *= points_per_axis(i);
  }

  VectorXd best = VectorXd::Zero(n);
  double best_value = std::numeric_limits<double>::infinity();
  VectorXd x(n);
  const long n0 = points_per_axis(0);
  const long n1 = n == 2 ? points_per_axis(1) : 1;
  for (long a = 0; a < n0; ++a) {
    x(0) = -bound(0) + static_cast<double>(a) * step;
    for (long b = 0; b < n1; ++b) {
      if (n == 2) x(1) = -bound(1) + static_cast<double>(b) * step;
      if (!domain.contains(x, 0.0)) continue;
      const double v = f.value(x);
      if (v < best_value) {
        best_value = v;
        best = x;
      }
    }
  }
  auto polished = projected_gradient_descent(f, domain, best, max_iters, tol);
  if (polished.value > best_value) {
    polished.argmin = best;
    polished.value = best_value;
  }
  return polished;
}

namespace {

VectorXd stack(const std::vector<VectorXd>& window) {
  Index n = 0;
  for (const auto& w : window) n += w.size();
  VectorXd z(n);
  Index off = 0;
  for (const auto& w : window) {
    z.segment(off, w.size()) = w;
    off += w.size();
  }
  return z;
}

}  // namespace

double QuadraticMemoryLoss::operator()(const std::vector<VectorXd>& window) const {
  require(window.size() == static_cast<std::size_t>(h) + 1, "QuadraticMemoryLoss: window must hold h+1 decisions");
  const VectorXd z = stack(window);
  require(z.size() == P.rows(), "QuadraticMemoryLoss: window dimension mismatch");
  return 0.5 * z.dot(P * z) + q.dot(z) + c;
}

std::vector<VectorXd> QuadraticMemoryLoss::gradient(const std::vector<VectorXd>& window) const {
  const VectorXd z = stack(window);
  require(z.size() == P.rows(), "QuadraticMemoryLoss: window dimension mismatch");
  const VectorXd g = 0.5 * (P + P.transpose()) * z + q;
  std::vector<VectorXd> blocks;
  for (int r = 0; r <= h; ++r) blocks.push_back(g.segment(r * dim, dim));
  return blocks;
}

MemoryLoss QuadraticMemoryLoss::as_memory_loss() const {
  return MemoryLoss{[self = *this](const std::vector<VectorXd>& w) { return self(w); },
                    [self = *this](const std::vector<VectorXd>& w) { return self.gradient(w); }};
}

QuadraticMemoryLoss QuadraticMemoryLoss::collapsed() const {
  const Index slots = h + 1;
  MatrixXd S(slots * dim, dim);
  for (Index r = 0; r < slots; ++r) S.middleRows(r * dim, dim).setIdentity();
  return QuadraticMemoryLoss{S.transpose() * P * S, S.transpose() * q, c, dim, 0};
}

Objective collapsed_sum_objective(const std::vector<QuadraticMemoryLoss>& losses) {
  require(!losses.empty(), "collapsed_sum_objective: no losses");
  const Index d = losses.front().dim;
  MatrixXd P = MatrixXd::Zero(d, d);
  VectorXd q = VectorXd::Zero(d);
  double c = 0.0;
  for (const auto& l : losses) {
    const auto col = l.collapsed();
    P += 0.5 * (col.P + col.P.transpose());
    q += col.q;
    c += col.c;
  }
  return Objective{[P, q, c](const VectorXd& x) { return 0.5 * x.dot(P * x) + q.dot(x) + c; },
                   [P, q](const VectorXd& x) -> VectorXd { return P * x + q; }};
}

std::vector<VectorXd> window_at(const std::vector<JointDecision>& decisions, std::size_t t, int h) {
  require(t < decisions.size(), "window_at: round out of range");
  std::vector<VectorXd> w;
  for (long r = h; r >= 0; --r) {
    const long s = static_cast<long>(t) - r;
    w.push_back(decisions[static_cast<std::size_t>(std::max(0L, s))].concat());
  }
  return w;
}

RegretReport eval_multiagent_regret(const std::vector<MemoryLoss>& losses,
                                    const std::vector<JointDecision>& decisions, int h,
                                    const Objective& collapsed_sum, const ComparatorOracle& oracle) {
  require(!losses.empty() && losses.size() == decisions.size(),
          "eval_multiagent_regret: need one loss per recorded decision");
  RegretReport rep;
  for (std::size_t t = 0; t < losses.size(); ++t) rep.algorithm_loss += losses[t].value(window_at(decisions, t, h));
  const auto best = oracle(collapsed_sum);
  rep.comparator = best.argmin;
  rep.comparator_loss = best.value;
  rep.converged = best.converged;
  rep.residual = best.residual;
  rep.average_regret = (rep.algorithm_loss - rep.comparator_loss) / static_cast<double>(losses.size());
  return rep;
}

}  // namespace mactl
