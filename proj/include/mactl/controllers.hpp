#pragma once

#include <optional>

#include "mactl/cost.hpp"
#include "mactl/markov.hpp"
#include "mactl/oco.hpp"
#include "mactl/peo.hpp"
#include "mactl/policies.hpp"
#include "mactl/stability.hpp"

namespace mactl {

/// Plant pre-stabilized by a feedback gain every agent knows. Learned
/// controllers see the closed loop A - BK; the actuators receive -Kx + u.
struct StabilizedPlant {
  LinearSystemd raw;
  LinearFeedbackd baseline;
  LinearSystemd closed;
  double spectral_radius = 0.0;

  VectorXd total_control(const VectorXd& x, const VectorXd& learned) const {
    return feedback_control(baseline, x) + learned;
  }
  /// Learned control whose total equals `total`.
  VectorXd learned_from_total(const VectorXd& x, const VectorXd& total) const { return total + baseline.K * x; }

  /// c(x, -Kx + u) as a cost in (x, u).
  QuadCostd wrap_cost(const QuadCostd& c) const;
  StageCost wrap_cost(const StageCost& c) const;
};

/// Throws InvalidInput unless rho(A - BK) < 1.
StabilizedPlant stabilize_and_wrap(const LinearSystemd& sys, LinearFeedbackd K);
/// K = 0; requires a stable plant.
StabilizedPlant stabilize_and_wrap(const LinearSystemd& sys);

/// Joint learned control after failures: failed actuators get a total command
/// of zero, which in closed-loop coordinates is u^i = K_i x.
VectorXd apply_failures(const StabilizedPlant& plant, const VectorXd& x, VectorXd learned,
                        const std::vector<bool>& failed);

/// Fixed-gain control -Kx on the raw plant with failed actuators zeroed.
VectorXd baseline_control(const LinearSystemd& raw, const LinearFeedbackd& K, const VectorXd& x,
                          const std::vector<bool>& failed);

enum class PolicyClass { dac, drc };

struct AgentOptions {
  PolicyClass policy = PolicyClass::dac;
  int m = 5;
  int h = 5;
  long burn_in = -1;  // negative means m + h
  double radius = 10.0;
  StepSchedule schedule = StepSchedule::inv_t(0.001);
  std::optional<MatrixXd> initial;  // theta_0, zero by default
  /// DRC agents: cost on (y^i, joint u) used by the agent's oracle.
  std::optional<StageCost> observation_cost;

  long effective_burn_in() const { return burn_in < 0 ? static_cast<long>(m) + h : burn_in; }
};

/// What every agent observes: states, the applied joint controls, recovered
/// disturbances and Nature's x, all in closed-loop coordinates.
struct SharedHistory {
  Trajectoryd x;
  Trajectoryd u;
  Trajectoryd w;
  Trajectoryd xnat;

  long steps() const { return static_cast<long>(x.size()); }
};

/// x_t for fully observed agents, y^i_t for DRC agents (empty otherwise).
struct Observation {
  VectorXd x;
  std::vector<VectorXd> y;
};

struct StepRecord {
  VectorXd intended;                 // joint learned control the agents committed to
  VectorXd applied;                  // after failures; what the closed loop receives
  std::vector<MatrixXd> thetas;      // policy used at t, per agent
  std::vector<double> oracle_values;  // l^i_t at the played window; NaN before burn-in
};

struct MagpcAgent {
  std::size_t index = 0;
  AgentOptions options;
  long burn_in = 0;
  LearnerState learner;
  ThetaWindow thetas;  // theta_{t-h}, ..., theta_t
  MarkovOperatord markov;
  Trajectoryd y;     // DRC only
  Trajectoryd ynat;  // DRC only

  const MatrixXd& theta() const { return thetas.back(); }
  const Trajectoryd& signal(const SharedHistory& shared) const {
    return options.policy == PolicyClass::dac ? shared.w : ynat;
  }
};

struct MagpcState {
  StabilizedPlant plant;
  std::vector<MagpcAgent> agents;
  SharedHistory history;
};

MagpcState make_magpc(StabilizedPlant plant, const std::vector<AgentOptions>& options);

/// One round of the multi-agent protocol at time t: recover w_{t-1}, every
/// agent commits theta^i_t W^i_t (zero before burn-in), failures are applied
/// and the applied controls recorded, then each agent past burn-in builds its
/// local oracle on the recorded history and takes an OGD step. `cost` is the
/// closed-loop stage cost c_t(x, u).
StepRecord magpc_step(MagpcState& state, long t, const Observation& obs, const StageCost& cost,
                      const std::vector<bool>& failed);

/// Single-learner baseline over the whole input. It records the controls it
/// intended, so under failures its disturbance estimates and oracle are wrong.
struct GpcState {
  StabilizedPlant plant;
  AgentOptions options;
  long burn_in = 0;
  LearnerState learner;
  MarkovOperatord markov;
  SharedHistory history;

  const MatrixXd& theta() const { return learner.iterate; }
};

GpcState make_gpc(StabilizedPlant plant, const AgentOptions& options);

/// GPC round: the oracle evaluates h+1 copies of the current policy with every
/// past control regenerated.
StepRecord gpc_step(GpcState& state, long t, const Observation& obs, const StageCost& cost,
                    const std::vector<bool>& failed);

}  // namespace mactl
