#include "mactl/peo.hpp"

#include <algorithm>
#include <cmath>

#include "mactl/policies.hpp"

namespace mactl {

namespace {

constexpr double kFiniteDifferenceStep = 1e-6;

struct CostValue {
  const VectorXd& y;
  const VectorXd& u;
  double operator()(const QuadCostd& c) const { return c(y, u); }
  double operator()(const GenericCost& c) const { return c.value(y, u); }
};

}  // namespace

double eval_cost(const StageCost& c, const VectorXd& y, const VectorXd& u) { return std::visit(CostValue{y, u}, c); }

std::pair<VectorXd, VectorXd> cost_gradient(const StageCost& c, const VectorXd& y, const VectorXd& u) {
  if (const auto* q = std::get_if<QuadCostd>(&c)) return {q->grad_x(y, u), q->grad_u(y, u)};
  const auto& f = std::get<GenericCost>(c).value;
  VectorXd gy(y.size()), gu(u.size());
  VectorXd yp = y, up = u;
  for (Index j = 0; j < y.size(); ++j) {
    yp(j) = y(j) + kFiniteDifferenceStep;
    const double hi = f(yp, u);
    yp(j) = y(j) - kFiniteDifferenceStep;
    const double lo = f(yp, u);
    yp(j) = y(j);
    gy(j) = (hi - lo) / (2.0 * kFiniteDifferenceStep);
  }
  for (Index j = 0; j < u.size(); ++j) {
    up(j) = u(j) + kFiniteDifferenceStep;
    const double hi = f(y, up);
    up(j) = u(j) - kFiniteDifferenceStep;
    const double lo = f(y, up);
    up(j) = u(j);
    gu(j) = (hi - lo) / (2.0 * kFiniteDifferenceStep);
  }
  return {gy, gu};
}

PeoContext make_peo_context(long t, long burn_in, const MarkovOperatord& G, StageCost cost, VectorXd base,
                            const std::vector<const Trajectoryd*>& signals, int m, const Trajectoryd& controls) {
  require(t >= burn_in, "make_peo_context: oracle is only defined after the burn-in");
  require(t >= 0, "make_peo_context: negative time");
  require(signals.size() == G.num_agents(), "make_peo_context: need one policy signal per agent");
  require(controls.size() > static_cast<std::size_t>(t), "make_peo_context: control history must include u_t");
  require(base.size() == G.output_dim(), "make_peo_context: base dimension mismatch");

  PeoContext ctx;
  ctx.t = t;
  ctx.burn_in = burn_in;
  ctx.markov = G;
  ctx.cost = std::move(cost);
  ctx.base = std::move(base);
  const int h = G.horizon();
  const Index du = G.input_dim();
  for (int k = 0; k <= h; ++k) {
    const long s = t - h + k;
    ctx.controls.push_back(s < 0 ? VectorXd::Zero(du) : controls[static_cast<std::size_t>(s)]);
    require(ctx.controls.back().size() == du, "make_peo_context: control dimension mismatch");
  }
  ctx.features.resize(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) {
    require(signals[i] != nullptr, "make_peo_context: missing policy signal");
    // Before the first disturbance is recovered every window is zero; the
    // signal lives in the output space (w for DAC, Nature's y for DRC).
    const Index dim = signals[i]->empty() ? G.output_dim() : signals[i]->front().size();
    for (int k = 0; k <= h; ++k) ctx.features[i].push_back(stack_window(*signals[i], t - h + k, m, dim));
  }
  return ctx;
}

namespace {

void check_window(const PeoContext& ctx, std::size_t agent, const ThetaWindow& thetas) {
  require(agent < ctx.num_agents(), "peo: agent index out of range");
  require(thetas.size() == static_cast<std::size_t>(ctx.h()) + 1, "peo: theta window must hold h+1 matrices");
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    require(thetas[k].rows() == ctx.markov.agent_width(agent) && thetas[k].cols() == ctx.features[agent][k].size(),
            "peo: theta shape does not match the agent's control and window dimensions");
  }
}

}  // namespace

Trajectoryd counterfactual_controls(const PeoContext& ctx, const std::vector<std::size_t>& agents,
                                    const std::vector<const ThetaWindow*>& thetas) {
  require(agents.size() == thetas.size(), "counterfactual_controls: one theta window per regenerated agent");
  Trajectoryd u = ctx.controls;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const std::size_t i = agents[a];
    check_window(ctx, i, *thetas[a]);
    for (std::size_t k = 0; k < u.size(); ++k)
      u[k].segment(ctx.markov.offsets[i], ctx.markov.agent_width(i)) = (*thetas[a])[k] * ctx.features[i][k];
  }
  return u;
}

VectorXd counterfactual_output(const PeoContext& ctx, const Trajectoryd& controls) {
  const int h = ctx.h();
  VectorXd y = ctx.base;
  // controls[k] is u_{t-h+k}; u_{t-r} pairs with block r-1.
  for (int r = 1; r <= h; ++r) y += ctx.markov.blocks[static_cast<std::size_t>(r - 1)] * controls[static_cast<std::size_t>(h - r)];
  return y;
}

namespace {

/// d(cost)/d(theta_k) for agent i, given the cost gradients at the counterfactual point.
std::vector<MatrixXd> theta_gradient(const PeoContext& ctx, std::size_t i, const VectorXd& gy, const VectorXd& gu) {
  const int h = ctx.h();
  std::vector<MatrixXd> grads(static_cast<std::size_t>(h) + 1);
  const Index off = ctx.markov.offsets[i];
  const Index width = ctx.markov.agent_width(i);
  for (int k = 0; k < h; ++k) {
    const VectorXd du = ctx.markov.agent_block(h - k - 1, i).transpose() * gy;
    grads[static_cast<std::size_t>(k)] = du * ctx.features[i][static_cast<std::size_t>(k)].transpose();
  }
  grads[static_cast<std::size_t>(h)] = gu.segment(off, width) * ctx.features[i][static_cast<std::size_t>(h)].transpose();
  return grads;
}

}  // namespace

double local_peo_eval(const PeoContext& ctx, std::size_t agent, const ThetaWindow& thetas) {
  const auto u = counterfactual_controls(ctx, {agent}, {&thetas});
  return eval_cost(ctx.cost, counterfactual_output(ctx, u), u.back());
}

std::vector<MatrixXd> local_peo_grad(const PeoContext& ctx, std::size_t agent, const ThetaWindow& thetas) {
  const auto u = counterfactual_controls(ctx, {agent}, {&thetas});
  const VectorXd y = counterfactual_output(ctx, u);
  const auto [gy, gu] = cost_gradient(ctx.cost, y, u.back());
  return theta_gradient(ctx, agent, gy, gu);
}

namespace {

Trajectoryd joint_controls(const PeoContext& ctx, const std::vector<ThetaWindow>& thetas) {
  require(thetas.size() == ctx.num_agents(), "joint_peo: need a theta window for every agent");
  std::vector<std::size_t> agents(thetas.size());
  std::vector<const ThetaWindow*> ptrs(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    agents[i] = i;
    ptrs[i] = &thetas[i];
  }
  return counterfactual_controls(ctx, agents, ptrs);
}

}  // namespace

double joint_peo_eval(const PeoContext& ctx, const std::vector<ThetaWindow>& thetas) {
  const auto u = joint_controls(ctx, thetas);
  return eval_cost(ctx.cost, counterfactual_output(ctx, u), u.back());
}

std::vector<std::vector<MatrixXd>> joint_peo_grad(const PeoContext& ctx, const std::vector<ThetaWindow>& thetas) {
  const auto u = joint_controls(ctx, thetas);
  const VectorXd y = counterfactual_output(ctx, u);
  const auto [gy, gu] = cost_gradient(ctx.cost, y, u.back());
  std::vector<std::vector<MatrixXd>> grads;
  for (std::size_t i = 0; i < thetas.size(); ++i) grads.push_back(theta_gradient(ctx, i, gy, gu));
  return grads;
}

int default_peo_horizon(double spectral_radius, long T, int cap) {
  require(T >= 2, "default_peo_horizon: T must be at least 2");
  if (spectral_radius <= 0.0) return 1;
  require(spectral_radius < 1.0, "default_peo_horizon: needs a stable system");
  const double h = std::ceil(std::log(static_cast<double>(T)) / std::log(1.0 / spectral_radius));
  return std::clamp(static_cast<int>(h), 1, cap);
}

}  // namespace mactl
