#include "mactl/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "mactl/config.hpp"
#include "mactl/riccati.hpp"

namespace mactl {

ControllerKind parse_controller(std::string_view name) {
  if (name == "magpc") return ControllerKind::magpc;
  if (name == "gpc") return ControllerKind::gpc;
  if (name == "lqr") return ControllerKind::lqr;
  if (name == "hinf") return ControllerKind::hinf;
  if (name == "zero") return ControllerKind::zero;
  throw InvalidInput("unknown controller '" + std::string(name) + "'");
}

std::string_view controller_name(ControllerKind c) {
  switch (c) {
    case ControllerKind::magpc: return "magpc";
    case ControllerKind::gpc: return "gpc";
    case ControllerKind::lqr: return "lqr";
    case ControllerKind::hinf: return "hinf";
    case ControllerKind::zero: return "zero";
  }
  return "unknown";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

constexpr double kDivergenceNorm = 1e100;
constexpr double kInf = std::numeric_limits<double>::infinity();

LinearSystemd random_scenario_plant(std::uint64_t seed) {
  GaussianSource g(seed ^ 0x9e3779b97f4a7c15ULL);
  const Index dx = 3;
  MatrixXd A(dx, dx);
  for (Index i = 0; i < dx; ++i)
    for (Index j = 0; j < dx; ++j) A(i, j) = g();
  A *= 0.8 / spectral_radius(A);
  std::vector<MatrixXd> Bs;
  for (int i = 0; i < 2; ++i) {
    MatrixXd B(dx, 1);
    for (Index r = 0; r < dx; ++r) B(r, 0) = g();
    Bs.push_back(B);
  }
  return LinearSystemd(A, Bs);
}

StepSchedule schedule_for(const ExperimentConfig& cfg) {
  const long offset = cfg.burn_in();
  if (cfg.lr_schedule == "inv_t") return StepSchedule::inv_t(cfg.lr_num, offset);
  if (cfg.lr_schedule == "inv_sqrt_t") return StepSchedule::inv_sqrt_t(cfg.lr_num, offset);
  if (cfg.lr_schedule == "constant") return StepSchedule::constant(cfg.lr_num);
  if (cfg.lr_schedule == "anytime") return StepSchedule::anytime();
  throw InvalidInput("unknown learning-rate schedule '" + cfg.lr_schedule + "'");
}

AgentOptions agent_options(const ExperimentConfig& cfg) {
  AgentOptions o;
  o.m = cfg.m;
  o.h = cfg.h;
  o.burn_in = cfg.burn_in();
  o.radius = cfg.radius;
  o.schedule = schedule_for(cfg);
  return o;
}

std::vector<bool> failures_at(const ExperimentConfig& cfg, std::size_t k, long t) {
  std::vector<bool> f(k, false);
  if (cfg.failure_agent > 0 && t >= cfg.failure_t) f[static_cast<std::size_t>(cfg.failure_agent - 1)] = true;
  return f;
}

}  // namespace

ScenarioInstance build_scenario(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::optional<LinearSystemd> sys;
  if (cfg.scenario == "admire") {
    sys = admire_system();
  } else if (cfg.scenario == "two_agent") {
    MatrixXd A(1, 1), B1(1, 1), B2(1, 1);
    A << 0.9;
    B1 << 1.0;
    B2 << 0.5;
    sys = LinearSystemd(A, {B1, B2});
  } else if (cfg.scenario == "random") {
    sys = random_scenario_plant(cfg.seed);
  } else {
    throw InvalidInput("unknown scenario '" + cfg.scenario + "'");
  }
  require(cfg.failure_agent <= static_cast<int>(sys->num_agents()), "failure_agent exceeds the number of agents");
  const Index dx = sys->state_dim(), du = sys->input_dim();
  QuadCostd cost = QuadCostd::identity(dx, du, cfg.Q_scale, cfg.R_scale);
  StabilizedPlant plant = spectral_radius(sys->A()) < 1.0
                              ? stabilize_and_wrap(*sys)
                              : stabilize_and_wrap(*sys, lqr_synthesize(*sys, cost.Q, cost.R));
  auto trace = generate_disturbances(cfg.profile, cfg.seed, static_cast<std::size_t>(cfg.T), dx);
  return ScenarioInstance{*sys, std::move(cost), std::move(plant), std::move(trace)};
}

ExperimentLog run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioInstance inst = build_scenario(cfg);
  const auto& sys = inst.sys;
  const auto& plant = inst.plant;
  const std::size_t k = sys.num_agents();
  const QuadCostd wrapped = plant.wrap_cost(inst.cost);

  ExperimentLog log;
  log.config = cfg;
  log.rows.reserve(static_cast<std::size_t>(cfg.T));

  std::optional<MagpcState> magpc;
  std::optional<GpcState> gpc;
  std::optional<LinearFeedbackd> fixed_gain;
  switch (cfg.controller) {
    case ControllerKind::magpc:
      magpc = make_magpc(plant, std::vector<AgentOptions>(k, agent_options(cfg)));
      break;
    case ControllerKind::gpc:
      gpc = make_gpc(plant, agent_options(cfg));
      break;
    case ControllerKind::lqr:
      fixed_gain = lqr_synthesize(sys, inst.cost.Q, inst.cost.R);
      break;
    case ControllerKind::hinf:
      fixed_gain = hinf_synthesize(sys.A(), sys.B(), inst.cost.Q, inst.cost.R, 1e-2, cfg.gamma_max).feedback;
      break;
    case ControllerKind::zero:
      break;
  }
  if (magpc || gpc) {
    log.learner = LearnerTrace{};
    log.learner->wrapped_cost = wrapped;
    log.learner->burn_in = cfg.burn_in();
  }

  VectorXd x = VectorXd::Zero(sys.state_dim());
  double total = 0.0;
  for (long t = 0; t < cfg.T; ++t) {
    const auto failed = failures_at(cfg, k, t);
    LogRow row;
    row.t = t;
    row.failed = std::find(failed.begin(), failed.end(), true) != failed.end();
    if (log.diverged_at) {
      row.cost = kInf;
      row.avg_cost = kInf;
      row.state_norm = kInf;
      row.u_norms.assign(k, kInf);
      log.rows.push_back(std::move(row));
      continue;
    }

    VectorXd u_total, x_next;
    const VectorXd& w = inst.trace.w[static_cast<std::size_t>(t)];
    if (fixed_gain) {
      u_total = baseline_control(sys, *fixed_gain, x, failed);
      x_next = step_dynamics(sys, x, u_total, w);
    } else {
      VectorXd applied;
      if (magpc || gpc) {
        StepRecord rec = magpc ? magpc_step(*magpc, t, {x, {}}, wrapped, failed) : gpc_step(*gpc, t, {x, {}}, wrapped, failed);
        applied = std::move(rec.applied);
        log.learner->applied.push_back(applied);
        log.learner->thetas.push_back(std::move(rec.thetas));
      } else {
        applied = apply_failures(plant, x, VectorXd::Zero(sys.input_dim()), failed);
      }
      u_total = plant.total_control(x, applied);
      x_next = step_dynamics(plant.closed, x, applied, w);
    }

    row.cost = inst.cost(x, u_total);
    total += row.cost;
    row.avg_cost = total / static_cast<double>(t + 1);
    row.state_norm = x.norm();
    for (std::size_t i = 0; i < k; ++i) row.u_norms.push_back(u_total.segment(sys.input_offset(i), sys.input_dim(i)).norm());
    log.rows.push_back(std::move(row));
    log.x.push_back(x);
    if (!x_next.allFinite() || x_next.norm() > kDivergenceNorm) log.diverged_at = t + 1;
    x = std::move(x_next);
  }
  log.total_cost = log.diverged_at ? kInf : total;
  log.average_cost = log.total_cost / static_cast<double>(cfg.T);
  if (magpc) {
    for (const auto& a : magpc->agents) log.learner->learners.push_back(a.learner);
  } else if (gpc) {
    log.learner->learners.push_back(gpc->learner);
  }

  if (cfg.regret && !log.diverged_at) {
    const auto comp = offline_dac_comparator(plant, wrapped, inst.trace.w, cfg.m, cfg.radius);
    if (magpc) {
      log.regret = measure_regret_terms(log, inst, comp);
    } else {
      RegretTerms r;
      r.comparator_cost = comp.total_cost / static_cast<double>(cfg.T);
      r.total = (log.total_cost - comp.total_cost) / static_cast<double>(cfg.T);
      r.comparator_converged = comp.converged;
      r.comparator_residual = comp.residual;
      log.regret = r;
    }
  }
  log.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return log;
}

OfflineComparator offline_dac_comparator(const StabilizedPlant& plant, const QuadCostd& c, const Trajectoryd& w, int m,
                                         double radius) {
  const auto& sys = plant.closed;
  const Index dx = sys.state_dim(), du = sys.input_dim();
  const std::size_t k = sys.num_agents();
  const Index cols = static_cast<Index>(m) * dx;
  std::vector<Index> z_off{0};
  for (std::size_t i = 0; i < k; ++i) z_off.push_back(z_off.back() + sys.input_dim(i) * cols);
  const Index nz = z_off.back();
  const long T = static_cast<long>(w.size());

  // u_t = U_t z with z the stacked column-major vec(M^i); x_t = x^nat_t + Psi_t z.
  auto control_map = [&](long t) {
    const VectorXd W = stack_window(w, t, m, dx);
    MatrixXd U = MatrixXd::Zero(du, nz);
    for (std::size_t i = 0; i < k; ++i) {
      const Index rows = sys.input_dim(i), uoff = sys.input_offset(i);
      for (Index col = 0; col < cols; ++col)
        for (Index r = 0; r < rows; ++r) U(uoff + r, z_off[i] + col * rows + r) = W(col);
    }
    return U;
  };

  MatrixXd H = MatrixXd::Zero(nz, nz);
  VectorXd b = VectorXd::Zero(nz);
  double c0 = 0.0;
  MatrixXd Psi = MatrixXd::Zero(dx, nz);
  VectorXd xnat = VectorXd::Zero(dx);
  for (long t = 0; t < T; ++t) {
    const MatrixXd U = control_map(t);
    const MatrixXd QPsi_NU = c.Q * Psi + c.N * U;
    H += Psi.transpose() * QPsi_NU + U.transpose() * (c.N.transpose() * Psi + c.R * U);
    b += Psi.transpose() * (c.Q * xnat) + U.transpose() * (c.N.transpose() * xnat);
    c0 += xnat.dot(c.Q * xnat);
    Psi = sys.A() * Psi + sys.B() * U;
    xnat = sys.A() * xnat + w[static_cast<std::size_t>(t)];
  }
  H = 0.5 * (H + H.transpose());
  const double scale = 1.0 / static_cast<double>(T);

  std::vector<LearnerState> shapes;
  for (std::size_t i = 0; i < k; ++i)
    shapes.emplace_back(BallDomain(radius, sys.input_dim(i) * cols, 1), StepSchedule::constant(0.0));
  const ProductDomain domain = product_domain(shapes);

  OfflineComparator out;
  VectorXd z = -H.ldlt().solve(b);
  if (!z.allFinite()) z = -H.completeOrthogonalDecomposition().solve(b);
  if (!domain.contains(z, 1e-12)) {
    Objective f;
    f.value = [&](const VectorXd& v) { return scale * (v.dot(H * v) + 2.0 * b.dot(v) + c0); };
    f.gradient = [&](const VectorXd& v) -> VectorXd { return scale * 2.0 * (H * v + b); };
    const auto res = projected_gradient_descent(f, domain, domain.project(z), 10000, 1e-8);
    z = res.argmin;
    out.converged = res.converged;
    out.residual = res.residual;
  }

  for (std::size_t i = 0; i < k; ++i) {
    const Index rows = sys.input_dim(i);
    out.policies.push_back(Eigen::Map<const MatrixXd>(z.data() + z_off[i], rows, cols));
  }
  VectorXd x = VectorXd::Zero(dx);
  for (long t = 0; t < T; ++t) {
    std::vector<VectorXd> parts;
    for (std::size_t i = 0; i < k; ++i) parts.push_back(out.policies[i] * stack_window(w, t, m, dx));
    const VectorXd u = join_controls(sys, parts);
    out.step_costs.push_back(c(x, u));
    out.total_cost += out.step_costs.back();
    x = step_dynamics(sys, x, u, w[static_cast<std::size_t>(t)]);
  }
  return out;
}

RegretTerms measure_regret_terms(const ExperimentLog& log, const ScenarioInstance& inst,
                                 const OfflineComparator& comparator) {
  require(log.learner.has_value(), "measure_regret_terms: log has no learner trace");
  require(!log.diverged_at, "measure_regret_terms: diverged run");
  const auto& cfg = log.config;
  const auto& tr = *log.learner;
  const auto& sys = inst.plant.closed;
  const std::size_t k = sys.num_agents();
  require(tr.learners.size() == k && comparator.policies.size() == k,
          "measure_regret_terms: needs one learner and one comparator policy per agent");
  const long T = cfg.T;
  const long Tb = tr.burn_in;
  const int h = cfg.h;
  const auto G = build_markov(sys, h);
  const auto xnat = natures_x(sys, inst.trace.w);
  std::vector<const Trajectoryd*> signals(k, &inst.trace.w);
  std::vector<ThetaWindow> star(k);
  for (std::size_t i = 0; i < k; ++i) star[i].assign(static_cast<std::size_t>(h) + 1, comparator.policies[i]);

  RegretTerms r;
  double rnat2 = 0.0;
  const double inv_T = 1.0 / static_cast<double>(T);
  for (long t = 0; t < T; ++t) {
    const double c_alg = log.rows[static_cast<std::size_t>(t)].cost;
    const double c_star = comparator.step_costs[static_cast<std::size_t>(t)];
    if (t < Tb) {
      r.burn_in += (c_alg - c_star) * inv_T;
      rnat2 = std::max(rnat2, xnat[static_cast<std::size_t>(t)].squaredNorm());
      continue;
    }
    const PeoContext ctx =
        make_peo_context(t, Tb, G, tr.wrapped_cost, xnat[static_cast<std::size_t>(t)], signals, cfg.m, tr.applied);
    std::vector<ThetaWindow> played(k);
    for (std::size_t i = 0; i < k; ++i)
      for (long s = t - h; s <= t; ++s) played[i].push_back(tr.thetas[static_cast<std::size_t>(std::max(0L, s))][i]);
    const double l_alg = joint_peo_eval(ctx, played);
    const double l_star = joint_peo_eval(ctx, star);
    r.algorithm_truncation += (c_alg - l_alg) * inv_T;
    r.policy_regret += (l_alg - l_star) * inv_T;
    r.comparator_truncation += (l_star - c_star) * inv_T;
    r.epsilon = std::max({r.epsilon, std::abs(c_alg - l_alg), std::abs(l_star - c_star)});
  }
  r.total = (log.total_cost - comparator.total_cost) * inv_T;
  for (std::size_t i = 0; i < k; ++i) r.ledger_bound += tr.learners[i].ledger.memory_regret(comparator.policies[i]) * inv_T;
  r.burn_in_bound = static_cast<double>(Tb) * tr.wrapped_cost.bound_constant() * rnat2 * inv_T;
  r.regret_bound = r.ledger_bound + r.burn_in_bound + 2.0 * r.epsilon + 1e-6;
  r.comparator_cost = comparator.total_cost * inv_T;
  r.comparator_converged = comparator.converged;
  r.comparator_residual = comparator.residual;
  return r;
}

void write_csv(std::ostream& os, const ExperimentLog& log) {
  const std::size_t k = log.rows.empty() ? 0 : log.rows.front().u_norms.size();
  os << "t,cost,avg_cost,state_norm";
  for (std::size_t i = 1; i <= k; ++i) os << ",u" << i;
  os << ",failed\n";
  for (const auto& r : log.rows) {
    os << r.t << ',' << format_double(r.cost) << ',' << format_double(r.avg_cost) << ',' << format_double(r.state_norm);
    for (double u : r.u_norms) os << ',' << format_double(u);
    os << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t hsh = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(cfg)) {
    hsh ^= ch;
    hsh *= 0x100000001b3ULL;
  }
  return hsh;
}

void write_summary(std::ostream& os, const ExperimentLog& log) {
  const auto& c = log.config;
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(c);
  double max_norm = 0.0;
  for (const auto& r : log.rows) max_norm = std::max(max_norm, r.state_norm);
  os << "scenario = " << c.scenario << '\n'
     << "controller = " << controller_name(c.controller) << '\n'
     << "profile = " << profile_name(c.profile) << '\n'
     << "seed = " << c.seed << '\n'
     << "T = " << c.T << '\n'
     << "config_hash = " << hash.str() << '\n'
     << "total_cost = " << format_double(log.total_cost) << '\n'
     << "average_cost = " << format_double(log.average_cost) << '\n'
     << "max_state_norm = " << format_double(max_norm) << '\n'
     << "diverged_at = " << (log.diverged_at ? std::to_string(*log.diverged_at) : std::string("none")) << '\n';
  if (log.regret) {
    const auto& r = *log.regret;
    os << "regret_total = " << format_double(r.total) << '\n'
       << "regret_burn_in = " << format_double(r.burn_in) << '\n'
       << "regret_algorithm_truncation = " << format_double(r.algorithm_truncation) << '\n'
       << "regret_policy = " << format_double(r.policy_regret) << '\n'
       << "regret_comparator_truncation = " << format_double(r.comparator_truncation) << '\n'
       << "regret_ledger_bound = " << format_double(r.ledger_bound) << '\n'
       << "regret_burn_in_bound = " << format_double(r.burn_in_bound) << '\n'
       << "epsilon = " << format_double(r.epsilon) << '\n'
       << "regret_bound = " << format_double(r.regret_bound) << '\n'
       << "comparator_average_cost = " << format_double(r.comparator_cost) << '\n'
       << "comparator_converged = " << (r.comparator_converged ? "true" : "false") << '\n'
       << "comparator_residual = " << format_double(r.comparator_residual) << '\n';
  }
}

OcoDemoReport demo_oco_counterexample(long T) {
  require(T >= 2 && T % 2 == 0, "demo_oco_counterexample: T must be even and at least 2");
  auto loss = [](double a, double b) { return (a - b) * (a - b) + 0.1 * (a * a + b * b); };
  OcoDemoReport rep;
  rep.T = T;

  // Scripted pair: both play +1 on odd rounds and -1 on even rounds (1-based).
  double joint = 0.0, local = 0.0;
  std::vector<double> partner;
  for (long t = 1; t <= T; ++t) {
    const double x = (t % 2 == 1) ? 1.0 : -1.0;
    rep.scripted_joint_loss.push_back(loss(x, x));
    joint += loss(x, x);
    local += loss(x, x);
    partner.push_back(x);
  }
  // Player 1's observed losses l^1_t(z) = l(z, x^2_t); the game is symmetric.
  Objective player;
  player.value = [&](const VectorXd& z) {
    double s = 0.0;
    for (double p : partner) s += loss(z(0), p);
    return s / static_cast<double>(T);
  };
  player.gradient = [&](const VectorXd& z) {
    double g = 0.0;
    for (double p : partner) g += 2.0 * (z(0) - p) + 0.2 * z(0);
    return VectorXd::Constant(1, g / static_cast<double>(T));
  };
  ProductDomain line{{BallDomain(1.0, 1, 1)}};
  rep.scripted_player_loss = local / static_cast<double>(T);
  rep.scripted_player_best = best_in_hindsight(player, line).value;
  rep.scripted_player_regret = rep.scripted_player_loss - rep.scripted_player_best;

  Objective joint_obj;
  joint_obj.value = [&](const VectorXd& z) { return loss(z(0), z(1)); };
  joint_obj.gradient = [&](const VectorXd& z) {
    VectorXd g(2);
    g << 2.0 * (z(0) - z(1)) + 0.2 * z(0), -2.0 * (z(0) - z(1)) + 0.2 * z(1);
    return g;
  };
  ProductDomain square{{BallDomain(1.0, 1, 1), BallDomain(1.0, 1, 1)}};
  const double joint_best = best_in_hindsight(joint_obj, square).value;  // the loss is the same every round
  rep.scripted_multiagent_regret = joint / static_cast<double>(T) - joint_best;

  std::vector<LearnerState> learners{
      LearnerState(BallDomain(1.0, 1, 1), StepSchedule::inv_sqrt_t(1.0), MatrixXd::Constant(1, 1, 1.0)),
      LearnerState(BallDomain(1.0, 1, 1), StepSchedule::inv_sqrt_t(1.0), MatrixXd::Constant(1, 1, -1.0))};
  const LocalGradientOracle oracle = [&](const JointDecision& x) {
    const VectorXd z = x.concat();
    const VectorXd g = joint_obj.gradient(z);
    return std::vector<MatrixXd>{MatrixXd::Constant(1, 1, g(0)), MatrixXd::Constant(1, 1, g(1))};
  };
  double ogd_total = 0.0;
  for (long t = 1; t <= T; ++t) {
    const JointDecision x = multiplayer_oco_round(learners, oracle);
    ogd_total += joint_obj.value(x.concat());
    rep.ogd_regret_curve.push_back(ogd_total / static_cast<double>(t) - joint_best);
  }
  rep.ogd_multiagent_regret = rep.ogd_regret_curve.back();
  return rep;
}

SharedControlsReport demo_shared_controls(const SharedControlsStrategy& strategy, long T) {
  require(T >= 1, "demo_shared_controls: T must be positive");
  SharedControlsReport rep;
  rep.T = T;
  std::vector<double> costs;
  // Agent 2 plays 0 (first trajectory) or 1 (second); agent 3 keeps the cost at 1.
  std::vector<double> third_first, third_second;
  for (long t = 0; t < T; ++t) {
    double u = strategy(t, costs, rep.u1);
    if (!(u >= 0.0 && u <= 1.0)) {
      if (rep.clamped++ == 0) std::cerr << "warning: shared-controls strategy left [0, 1]; clamping\n";
      u = std::isnan(u) ? 0.0 : std::clamp(u, 0.0, 1.0);
    }
    rep.u1.push_back(u);
    const double a = std::sqrt(std::max(0.0, 1.0 - u * u));
    const double b = std::sqrt(std::max(0.0, 1.0 - (u - 1.0) * (u - 1.0)));
    third_first.push_back(a);
    third_second.push_back(b);
    costs.push_back(u * u + a * a);
  }
  auto regret = [&](double partner, const std::vector<double>& third) {
    double alg = 0.0;
    for (long t = 0; t < T; ++t) {
      const double d = rep.u1[static_cast<std::size_t>(t)] - partner;
      alg += d * d + third[static_cast<std::size_t>(t)] * third[static_cast<std::size_t>(t)];
    }
    double best = kInf;
    for (int j = 0; j <= 1000; ++j) {
      const double cst = j / 1000.0;
      double s = 0.0;
      for (long t = 0; t < T; ++t) s += (cst - partner) * (cst - partner) + third[static_cast<std::size_t>(t)] * third[static_cast<std::size_t>(t)];
      best = std::min(best, s);
    }
    return (alg - best) / static_cast<double>(T);
  };
  rep.regret_first = regret(0.0, third_first);
  rep.regret_second = regret(1.0, third_second);
  rep.max_regret = std::max(rep.regret_first, rep.regret_second);
  return rep;
}

SharedControlsStrategy ogd_shared_controls_strategy() {
  // Alternating probe around a base point; the base moves along a finite
  // difference of the last two observed costs.
  return [](long t, const std::vector<double>& costs, const std::vector<double>& own) {
    constexpr double probe = 0.05;
    double base = 0.3;
    for (std::size_t s = 2; s <= own.size(); ++s) {
      const double du = own[s - 1] - own[s - 2];
      const double g = du != 0.0 ? (costs[s - 1] - costs[s - 2]) / du : 0.0;
      base = std::clamp(base - g / std::sqrt(static_cast<double>(s)), probe, 1.0 - probe);
    }
    return base + ((t % 2 == 0) ? probe : -probe);
  };
}

std::vector<ExperimentLog> run_replicas(const ExperimentConfig& cfg, int replicas) {
  require(replicas >= 1, "run_replicas: need at least one replica");
  std::vector<ExperimentLog> out(static_cast<std::size_t>(replicas));
  const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(replicas)));
  for (int first = 0; first < replicas; first += static_cast<int>(workers)) {
    std::vector<std::future<ExperimentLog>> batch;
    for (int r = first; r < std::min(replicas, first + static_cast<int>(workers)); ++r) {
      ExperimentConfig c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(r);
      batch.push_back(std::async(std::launch::async, [c] { return run_experiment(c); }));
    }
    for (std::size_t j = 0; j < batch.size(); ++j) out[static_cast<std::size_t>(first) + j] = batch[j].get();
  }
  return out;
}

}  // namespace mactl
