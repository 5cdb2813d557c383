#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "mactl/controllers.hpp"
#include "mactl/disturbance.hpp"

namespace mactl {

enum class ControllerKind { magpc, gpc, lqr, hinf, zero };

ControllerKind parse_controller(std::string_view name);
std::string_view controller_name(ControllerKind c);

/// Everything that determines a run. Two runs from equal configs produce
/// equal logs.
struct ExperimentConfig {
  std::string scenario = "admire";  // admire | two_agent | random
  long T = 2000;
  std::uint64_t seed = 0;
  DisturbanceProfile profile = DisturbanceProfile::gaussian;
  ControllerKind controller = ControllerKind::magpc;
  double lr_num = 0.001;
  std::string lr_schedule = "inv_t";  // inv_t | inv_sqrt_t | constant | anytime
  int h = 5;
  int m = 5;
  long Tb = -1;               // negative means m + h
  int failure_agent = 0;      // 1-based; 0 disables failures
  long failure_t = 500;
  double Q_scale = 1.0;
  double R_scale = 1.0;
  double radius = 10.0;       // learner policy ball and comparator ball
  double gamma_max = 1000.0;  // upper end of the H-infinity bisection
  bool regret = false;        // also compute the offline comparator and regret terms

  long burn_in() const { return Tb < 0 ? static_cast<long>(m) + h : Tb; }
  bool operator==(const ExperimentConfig&) const = default;
};

/// Plant, cost and disturbance a config describes.
struct ScenarioInstance {
  LinearSystemd sys;
  QuadCostd cost;           // on the raw plant
  StabilizedPlant plant;    // shared baseline for learned controllers
  DisturbanceTrace trace;
};

ScenarioInstance build_scenario(const ExperimentConfig& cfg);

struct LogRow {
  long t = 0;
  double cost = 0.0;
  double avg_cost = 0.0;
  double state_norm = 0.0;
  std::vector<double> u_norms;  // per agent, total applied control
  bool failed = false;
};

/// Closed-loop record of a learned controller, enough to recompute oracles.
struct LearnerTrace {
  QuadCostd wrapped_cost;
  Trajectoryd applied;                       // learned controls in closed-loop coordinates
  std::vector<std::vector<MatrixXd>> thetas;  // [t][agent]
  std::vector<LearnerState> learners;        // final state, one per learner
  long burn_in = 0;
};

struct RegretTerms {
  double total = 0.0;  // (alg cost - comparator cost) / T
  double burn_in = 0.0;
  double algorithm_truncation = 0.0;
  double policy_regret = 0.0;
  double comparator_truncation = 0.0;
  double ledger_bound = 0.0;       // sum_i ledger regret at the comparator / T
  double burn_in_bound = 0.0;      // T_b C R_nat^2 / T
  double epsilon = 0.0;            // max per-step truncation error observed
  double regret_bound = 0.0;      // ledger + burn-in bound + 2 eps + 1e-6
  double comparator_cost = 0.0;    // average per-step comparator cost
  bool comparator_converged = true;
  double comparator_residual = 0.0;

  double decomposition_sum() const { return burn_in + algorithm_truncation + policy_regret + comparator_truncation; }
};

struct ExperimentLog {
  ExperimentConfig config;
  std::vector<LogRow> rows;
  Trajectoryd x;  // x_0 .. x_{T-1}
  double total_cost = 0.0;
  double average_cost = 0.0;
  std::optional<long> diverged_at;
  std::optional<LearnerTrace> learner;
  std::optional<RegretTerms> regret;
  double wall_clock_s = 0.0;
};

/// Runs the configured controller on the configured scenario. Diverging runs
/// (non-finite state or |x| > 1e100) stop simulating and fill the remaining
/// rows with infinite cost.
ExperimentLog run_experiment(const ExperimentConfig& cfg);

/// Best joint DAC in the product of per-agent balls of radius R for the
/// realized disturbances, on the closed loop, with its total cost.
struct OfflineComparator {
  std::vector<MatrixXd> policies;  // per agent
  std::vector<double> step_costs;  // c_t along the comparator's trajectory
  double total_cost = 0.0;
  bool converged = true;
  double residual = 0.0;
};

OfflineComparator offline_dac_comparator(const StabilizedPlant& plant, const QuadCostd& wrapped_cost,
                                         const Trajectoryd& w, int m, double radius);

/// Four-term decomposition of the regret of a MAGPC log against the offline
/// comparator, plus the overall regret bound assembled from measured terms.
RegretTerms measure_regret_terms(const ExperimentLog& log, const ScenarioInstance& inst,
                                 const OfflineComparator& comparator);

/// CSV with header t,cost,avg_cost,state_norm,u1..uk,failed.
void write_csv(std::ostream& os, const ExperimentLog& log);
/// key = value lines.
void write_summary(std::ostream& os, const ExperimentLog& log);
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

struct OcoDemoReport {
  long T = 0;
  std::vector<double> scripted_joint_loss;  // per round
  double scripted_player_loss = 0.0;        // average local loss per player
  double scripted_player_best = 0.0;        // best fixed local loss in hindsight
  double scripted_player_regret = 0.0;      // average, per player (negative)
  double scripted_multiagent_regret = 0.0;  // average
  double ogd_multiagent_regret = 0.0;       // average
  std::vector<double> ogd_regret_curve;     // average regret after rounds 1..T
};

/// The two-player game l(x1, x2) = (x1 - x2)^2 + 0.1 |x|^2 played by the
/// alternating scripted pair and by linearized OGD learners.
OcoDemoReport demo_oco_counterexample(long T);

/// Agent 1's deterministic strategy: (t, observed costs so far, own past controls) -> u^1_t.
using SharedControlsStrategy =
    std::function<double(long, const std::vector<double>&, const std::vector<double>&)>;

struct SharedControlsReport {
  long T = 0;
  std::vector<double> u1;
  double regret_first = 0.0;   // trajectory with u^2 = 0
  double regret_second = 0.0;  // trajectory with u^2 = 1
  double max_regret = 0.0;
  long clamped = 0;
};

/// Replays agent 1 against the two adversarial trajectories of the
/// unshared-controls construction. Regrets are measured against the best
/// constant c in [0, 1] for agent 1 with the other agents' trajectories fixed.
SharedControlsReport demo_shared_controls(const SharedControlsStrategy& strategy, long T);

/// Zeroth-order OGD on agent 1's observed costs, starting at 0.3.
SharedControlsStrategy ogd_shared_controls_strategy();

/// Runs independent replicas with seeds seed, seed+1, ... in parallel.
std::vector<ExperimentLog> run_replicas(const ExperimentConfig& cfg, int replicas);

}  // namespace mactl
