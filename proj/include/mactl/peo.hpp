#pragma once

#include <functional>
#include <variant>

#include "mactl/cost.hpp"
#include "mactl/markov.hpp"

namespace mactl {

/// Differentiable cost given only by its value; gradients fall back to central
/// differences with step 1e-6.
struct GenericCost {
  std::function<double(const VectorXd&, const VectorXd&)> value;
};

using StageCost = std::variant<QuadCostd, GenericCost>;

double eval_cost(const StageCost& c, const VectorXd& y, const VectorXd& u);
/// (d/dy, d/du) of the stage cost.
std::pair<VectorXd, VectorXd> cost_gradient(const StageCost& c, const VectorXd& y, const VectorXd& u);

/// h+1 policy matrices theta_{t-h}, ..., theta_t (oldest first).
using ThetaWindow = std::vector<MatrixXd>;

/// Immutable snapshot of what the oracle needs at time t (0-based):
///
///   base      Nature's output at t (x^nat_t, or agent i's y^nat_t)
///   features  per agent, the policy input windows W_{t-h}, ..., W_t
///   controls  recorded joint controls u_{t-h}, ..., u_t (zero before time 0)
///
/// The counterfactual output is base + sum_{r=1..h} G_{r-1} u~_{t-r}, where
/// regenerated agents play u~^i_s = theta_s W^i_s.
struct PeoContext {
  long t = 0;
  long burn_in = 0;
  MarkovOperatord markov;
  StageCost cost;
  VectorXd base;
  std::vector<Trajectoryd> features;
  Trajectoryd controls;

  int h() const { return markov.horizon(); }
  std::size_t num_agents() const { return markov.num_agents(); }
};

/// Builds the snapshot from time-indexed histories. `signals[i]` is agent i's
/// policy input signal (w for DAC, y^nat_i for DRC), windowed with length m.
/// Requires t >= burn_in.
PeoContext make_peo_context(long t, long burn_in, const MarkovOperatord& G, StageCost cost, VectorXd base,
                            const std::vector<const Trajectoryd*>& signals, int m, const Trajectoryd& controls);

/// Joint controls u~_{t-h..t} with the listed agents regenerated.
Trajectoryd counterfactual_controls(const PeoContext& ctx, const std::vector<std::size_t>& agents,
                                    const std::vector<const ThetaWindow*>& thetas);
/// base + sum_r G_r u~_{t-1-r}.
VectorXd counterfactual_output(const PeoContext& ctx, const Trajectoryd& controls);

/// Local oracle: agent i's window regenerated, other agents' recorded controls kept.
double local_peo_eval(const PeoContext& ctx, std::size_t agent, const ThetaWindow& thetas);
/// Gradient of local_peo_eval with respect to each of the h+1 matrices.
std::vector<MatrixXd> local_peo_grad(const PeoContext& ctx, std::size_t agent, const ThetaWindow& thetas);

/// Joint oracle: every agent's window regenerated.
double joint_peo_eval(const PeoContext& ctx, const std::vector<ThetaWindow>& thetas);
std::vector<std::vector<MatrixXd>> joint_peo_grad(const PeoContext& ctx, const std::vector<ThetaWindow>& thetas);

/// Default horizon ceil(log T / log(1/rho)), targeting 1/T truncation error.
int default_peo_horizon(double spectral_radius, long T, int cap = 1000);

}  // namespace mactl
