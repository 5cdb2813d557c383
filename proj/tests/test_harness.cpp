#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "mactl/config.hpp"
#include "mactl/harness.hpp"

using namespace mactl;

namespace {

ExperimentConfig two_agent(long T, std::uint64_t seed = 0) {
  ExperimentConfig c;
  c.scenario = "two_agent";
  c.T = T;
  c.seed = seed;
  c.lr_num = 0.1;
  c.h = 20;
  c.m = 2;
  return c;
}

std::map<std::string, std::string> parse_summary(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

/// Average cost of a fixed joint DAC on the closed loop, by direct simulation.
double rollout_average(const StabilizedPlant& plant, const QuadCostd& c, const Trajectoryd& w, int m,
                       const std::vector<MatrixXd>& policies) {
  const auto& sys = plant.closed;
  VectorXd x = VectorXd::Zero(sys.state_dim());
  double total = 0.0;
  for (long t = 0; t < static_cast<long>(w.size()); ++t) {
    std::vector<VectorXd> parts;
    for (const auto& M : policies) parts.push_back(M * stack_window(w, t, m, sys.state_dim()));
    const VectorXd u = join_controls(sys, parts);
    total += c(x, u);
    x = step_dynamics(sys, x, u, w[static_cast<std::size_t>(t)]);
  }
  return total / static_cast<double>(w.size());
}

}  // namespace

TEST(Harness, RunsAreDeterministic) {
  auto cfg = two_agent(300, 4);
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  std::ostringstream ca, cb, sa, sb;
  write_csv(ca, a);
  write_csv(cb, b);
  write_summary(sa, a);
  write_summary(sb, b);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Harness, ReplicasMatchSequentialRuns) {
  auto cfg = two_agent(200, 10);
  const auto reps = run_replicas(cfg, 3);
  ASSERT_EQ(reps.size(), 3u);
  for (int r = 0; r < 3; ++r) {
    auto c = cfg;
    c.seed = 10 + static_cast<std::uint64_t>(r);
    EXPECT_EQ(reps[static_cast<std::size_t>(r)].total_cost, run_experiment(c).total_cost);
    EXPECT_EQ(reps[static_cast<std::size_t>(r)].config.seed, c.seed);
  }
}

TEST(Harness, ZeroDisturbanceCostsNothing) {
  for (auto ctrl : {ControllerKind::magpc, ControllerKind::gpc, ControllerKind::lqr, ControllerKind::hinf}) {
    ExperimentConfig c;
    c.T = 100;
    c.profile = DisturbanceProfile::zero;
    c.controller = ctrl;
    c.failure_agent = 4;
    c.failure_t = 20;
    const auto log = run_experiment(c);
    EXPECT_EQ(log.total_cost, 0.0) << controller_name(ctrl);
  }
}

TEST(Harness, CsvAndSummaryAgreeWithColumnSums) {
  ExperimentConfig c;
  c.T = 400;
  c.controller = ControllerKind::lqr;
  c.failure_agent = 2;
  c.failure_t = 100;
  const auto log = run_experiment(c);
  std::ostringstream csv, sum;
  write_csv(csv, log);
  write_summary(sum, log);

  std::istringstream is(csv.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,cost,avg_cost,state_norm,u1,u2,u3,u4,failed");
  double total = 0.0;
  long rows = 0, failed = 0;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_EQ(std::stol(cells[0]), rows);
    total += std::stod(cells[1]);
    EXPECT_NEAR(std::stod(cells[2]), total / static_cast<double>(rows + 1), 1e-9 * std::max(1.0, total));
    failed += std::stol(cells[8]);
    if (cells[8] == "1") EXPECT_EQ(std::stod(cells[5]), 0.0);  // agent 2
    ++rows;
  }
  EXPECT_EQ(rows, 400);
  EXPECT_EQ(failed, 300);
  const auto kv = parse_summary(sum.str());
  EXPECT_NEAR(std::stod(kv.at("total_cost")), total, 1e-9 * total);
  EXPECT_EQ(kv.at("seed"), "0");
  EXPECT_EQ(kv.at("diverged_at"), "none");
  EXPECT_EQ(kv.at("config_hash").size(), 16u);
}

TEST(Harness, ConfigHashTracksConfig) {
  ExperimentConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Harness, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5})
    EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Harness, DivergedRunsAreFilledWithInfinity) {
  auto c = two_agent(400);
  c.lr_schedule = "constant";
  c.h = 5;
  c.m = 5;
  c.lr_num = 1000.0;
  c.radius = 1e200;
  c.profile = DisturbanceProfile::random_walk;
  const auto log = run_experiment(c);
  ASSERT_TRUE(log.diverged_at.has_value());
  EXPECT_TRUE(std::isinf(log.total_cost));
  EXPECT_TRUE(std::isinf(log.rows.back().cost));
  EXPECT_EQ(log.rows.size(), 400u);
}

TEST(Comparator, IsStationaryForExplicitRollouts) {
  const auto cfg = two_agent(400, 3);
  const auto inst = build_scenario(cfg);
  const QuadCostd wc = inst.plant.wrap_cost(inst.cost);
  const auto comp = offline_dac_comparator(inst.plant, wc, inst.trace.w, cfg.m, cfg.radius);
  const double base = rollout_average(inst.plant, wc, inst.trace.w, cfg.m, comp.policies);
  EXPECT_NEAR(base, comp.total_cost / 400.0, 1e-10);
  const double eps = 1e-4;
  for (std::size_t i = 0; i < 2; ++i)
    for (Index e = 0; e < comp.policies[i].size(); ++e) {
      auto hi = comp.policies, lo = comp.policies;
      hi[i].data()[e] += eps;
      lo[i].data()[e] -= eps;
      const double fd = (rollout_average(inst.plant, wc, inst.trace.w, cfg.m, hi) -
                         rollout_average(inst.plant, wc, inst.trace.w, cfg.m, lo)) / (2 * eps);
      EXPECT_NEAR(fd, 0.0, 1e-6);
      EXPECT_GE(rollout_average(inst.plant, wc, inst.trace.w, cfg.m, hi), base);
    }
}

TEST(Comparator, ProjectsOntoSmallBall) {
  auto cfg = two_agent(300, 3);
  const auto inst = build_scenario(cfg);
  const QuadCostd wc = inst.plant.wrap_cost(inst.cost);
  const auto comp = offline_dac_comparator(inst.plant, wc, inst.trace.w, cfg.m, 0.05);
  const double base = rollout_average(inst.plant, wc, inst.trace.w, cfg.m, comp.policies);
  for (const auto& M : comp.policies) EXPECT_LE(M.norm(), 0.05 + 1e-12);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto other = comp.policies;
    for (auto& M : other) {
      for (Index e = 0; e < M.size(); ++e) M.data()[e] += 0.01 * n(rng);
      if (M.norm() > 0.05) M *= 0.05 / M.norm();
    }
    EXPECT_GE(rollout_average(inst.plant, wc, inst.trace.w, cfg.m, other), base - 1e-9);
  }
}

TEST(Regret, DecompositionSumsToTotal) {
  for (const char* scen : {"two_agent", "random", "admire"}) {
    ExperimentConfig c;
    c.scenario = scen;
    c.T = 600;
    c.seed = 2;
    c.regret = true;
    c.lr_num = 0.05;
    const auto log = run_experiment(c);
    ASSERT_TRUE(log.regret.has_value()) << scen;
    EXPECT_NEAR(log.regret->decomposition_sum(), log.regret->total, 1e-8) << scen;
    EXPECT_LE(log.regret->total, log.regret->regret_bound) << scen;
  }
}

TEST(Regret, NoBurnInMeansNoBurnInTerm) {
  auto c = two_agent(300);
  c.Tb = 0;
  c.regret = true;
  const auto log = run_experiment(c);
  EXPECT_EQ(log.regret->burn_in, 0.0);
  EXPECT_NEAR(log.regret->decomposition_sum(), log.regret->total, 1e-8);
}

TEST(Regret, TwoAgentAverageCostNearOfflineOptimum) {
  // Mean over seeds of (average cost / offline average cost - 1).
  double excess = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    auto c = two_agent(5000, s);
    c.regret = true;
    const auto log = run_experiment(c);
    excess += log.average_cost / log.regret->comparator_cost - 1.0;
  }
  EXPECT_LE(excess / 8.0, 0.05);
}

TEST(Demo, ScriptedPairHasNegativeLocalButPositiveJointRegret) {
  const auto r = demo_oco_counterexample(1000);
  for (double l : r.scripted_joint_loss) EXPECT_NEAR(l, 0.2, 1e-12);
  // Player 1 faces x2 = +-1 alternately: best fixed z minimizes
  // mean((z - x2)^2) + 0.1 z^2 + 0.1 = 1 + 1.1 z^2 + 0.1, so z = 0.
  EXPECT_NEAR(r.scripted_player_best, 1.1, 1e-12);
  EXPECT_NEAR(r.scripted_player_regret, 0.2 - 1.1, 1e-12);
  EXPECT_NEAR(r.scripted_multiagent_regret, 0.2, 1e-12);
  EXPECT_LT(r.ogd_multiagent_regret, r.scripted_multiagent_regret);
  EXPECT_THROW(demo_oco_counterexample(3), InvalidInput);
}

TEST(Demo, SharedControlsConstantStrategies) {
  auto constant = [](double v) { return SharedControlsStrategy([v](long, const auto&, const auto&) { return v; }); };
  const auto zero = demo_shared_controls(constant(0.0), 500);
  EXPECT_NEAR(zero.regret_second, 1.0, 1e-12);
  const auto one = demo_shared_controls(constant(1.0), 500);
  EXPECT_NEAR(one.regret_first, 1.0, 1e-12);
  const auto half = demo_shared_controls(constant(0.5), 500);
  EXPECT_NEAR(half.regret_first, 0.25, 1e-12);
  EXPECT_NEAR(half.regret_second, 0.25, 1e-12);
  const auto wild = demo_shared_controls(constant(3.0), 10);
  EXPECT_EQ(wild.clamped, 10);
  EXPECT_EQ(wild.u1.front(), 1.0);
}
