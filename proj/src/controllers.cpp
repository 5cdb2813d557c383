#include "mactl/controllers.hpp"

#include <cmath>
#include <limits>

namespace mactl {

QuadCostd StabilizedPlant::wrap_cost(const QuadCostd& c) const {
  const MatrixXd& K = baseline.K;
  MatrixXd Q = c.Q - c.N * K - K.transpose() * c.N.transpose() + K.transpose() * c.R * K;
  Q = 0.5 * (Q + Q.transpose());
  return QuadCostd(std::move(Q), c.R, c.N - K.transpose() * c.R);
}

StageCost StabilizedPlant::wrap_cost(const StageCost& c) const {
  if (const auto* q = std::get_if<QuadCostd>(&c)) return wrap_cost(*q);
  const auto f = std::get<GenericCost>(c).value;
  const MatrixXd K = baseline.K;
  return GenericCost{[f, K](const VectorXd& x, const VectorXd& u) { return f(x, VectorXd(u - K * x)); }};
}

StabilizedPlant stabilize_and_wrap(const LinearSystemd& sys, LinearFeedbackd K) {
  require(K.K.rows() == sys.input_dim() && K.K.cols() == sys.state_dim(), "stabilize_and_wrap: K must be d_u x d_x");
  MatrixXd closed_A = sys.A() - sys.B() * K.K;
  const double rho = spectral_radius(closed_A);
  require(rho < 1.0, "stabilize_and_wrap: K does not stabilize the plant (spectral radius " + std::to_string(rho) + ")");
  StabilizedPlant p{sys, std::move(K), sys.with_A(std::move(closed_A)), rho};
  return p;
}

StabilizedPlant stabilize_and_wrap(const LinearSystemd& sys) {
  return stabilize_and_wrap(sys, LinearFeedbackd{MatrixXd::Zero(sys.input_dim(), sys.state_dim())});
}

VectorXd apply_failures(const StabilizedPlant& plant, const VectorXd& x, VectorXd learned,
                        const std::vector<bool>& failed) {
  const auto& sys = plant.closed;
  require(failed.empty() || failed.size() == sys.num_agents(), "apply_failures: one flag per agent");
  for (std::size_t i = 0; i < failed.size(); ++i) {
    if (!failed[i]) continue;
    const Index off = sys.input_offset(i), width = sys.input_dim(i);
    learned.segment(off, width) = plant.baseline.K.middleRows(off, width) * x;
  }
  return learned;
}

VectorXd baseline_control(const LinearSystemd& raw, const LinearFeedbackd& K, const VectorXd& x,
                          const std::vector<bool>& failed) {
  require(failed.empty() || failed.size() == raw.num_agents(), "baseline_control: one flag per agent");
  VectorXd u = feedback_control(K, x);
  for (std::size_t i = 0; i < failed.size(); ++i)
    if (failed[i]) u.segment(raw.input_offset(i), raw.input_dim(i)).setZero();
  return u;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Appends x_t and, for t > 0, the recovered w_{t-1} and Nature's x_t.
void observe_state(SharedHistory& h, const LinearSystemd& closed, long t, const VectorXd& x) {
  require(t == h.steps(), "controller step: time " + std::to_string(t) + " out of sequence (expected " +
                              std::to_string(h.steps()) + ")");
  require(h.u.size() == h.x.size(), "controller step: inconsistent control history");
  require(x.size() == closed.state_dim(), "controller step: state dimension mismatch");
  if (t == 0) {
    h.xnat.push_back(x);
  } else {
    h.w.push_back(recover_disturbance(closed, h.x.back(), h.u.back(), x));
    h.xnat.push_back(closed.A() * h.xnat.back() + h.w.back());
  }
  h.x.push_back(x);
}

MatrixXd initial_theta(const AgentOptions& opt, Index rows, Index cols) {
  if (!opt.initial) return MatrixXd::Zero(rows, cols);
  require(opt.initial->rows() == rows && opt.initial->cols() == cols, "controller: initial policy has the wrong shape");
  return *opt.initial;
}

double window_inner(const std::vector<MatrixXd>& grads, const ThetaWindow& thetas) {
  double s = 0.0;
  for (std::size_t k = 0; k < grads.size(); ++k) s += (grads[k].array() * thetas[k].array()).sum();
  return s;
}

MatrixXd block_sum(const std::vector<MatrixXd>& grads) {
  MatrixXd g = grads.front();
  for (std::size_t k = 1; k < grads.size(); ++k) g += grads[k];
  return g;
}

void check_options(const AgentOptions& opt) {
  require(opt.m >= 1, "controller: window length m must be at least 1");
  require(opt.h >= 1, "controller: oracle horizon h must be at least 1");
  require(opt.radius > 0.0, "controller: policy radius must be positive");
}

}  // namespace

MagpcState make_magpc(StabilizedPlant plant, const std::vector<AgentOptions>& options) {
  MagpcState s{std::move(plant), {}, {}};
  const auto& sys = s.plant.closed;
  require(options.size() == sys.num_agents(), "make_magpc: need options for every agent");
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto& opt = options[i];
    check_options(opt);
    MagpcAgent a;
    a.index = i;
    a.options = opt;
    a.burn_in = opt.effective_burn_in();
    Index signal_dim = sys.state_dim();
    if (opt.policy == PolicyClass::drc) {
      require(opt.observation_cost.has_value(), "make_magpc: DRC agents need an observation cost");
      a.markov = build_markov(sys, opt.h, std::optional<MatrixXd>(sys.C(i)));
      signal_dim = sys.obs_dim(i);
    } else {
      a.markov = build_markov(sys, opt.h);
    }
    const Index rows = sys.input_dim(i), cols = static_cast<Index>(opt.m) * signal_dim;
    a.learner = LearnerState(BallDomain(opt.radius, rows, cols), opt.schedule, initial_theta(opt, rows, cols));
    a.thetas.assign(static_cast<std::size_t>(opt.h) + 1, a.learner.iterate);
    s.agents.push_back(std::move(a));
  }
  return s;
}

StepRecord magpc_step(MagpcState& state, long t, const Observation& obs, const StageCost& cost,
                      const std::vector<bool>& failed) {
  const auto& sys = state.plant.closed;
  auto& hist = state.history;
  observe_state(hist, sys, t, obs.x);
  for (auto& a : state.agents) {
    if (a.options.policy != PolicyClass::drc) continue;
    require(obs.y.size() == sys.num_agents() && obs.y[a.index].size() == sys.obs_dim(a.index),
            "magpc_step: missing observation for a DRC agent");
    a.y.push_back(obs.y[a.index]);
    a.ynat.push_back(estimate_natures_y(a.y, hist.u, a.markov, t));
  }

  StepRecord rec;
  rec.intended = VectorXd::Zero(sys.input_dim());
  rec.oracle_values.assign(state.agents.size(), kNaN);
  for (const auto& a : state.agents) {
    rec.thetas.push_back(a.theta());
    if (t < a.burn_in) continue;
    const auto& sig = a.signal(hist);
    const Index dim = sig.empty() ? 0 : sig.front().size();
    rec.intended.segment(sys.input_offset(a.index), sys.input_dim(a.index)) =
        a.theta() * stack_window(sig, t, a.options.m, dim);
  }
  rec.applied = apply_failures(state.plant, obs.x, rec.intended, failed);
  hist.u.push_back(rec.applied);

  for (auto& a : state.agents) {
    if (t < a.burn_in) {
      a.thetas.erase(a.thetas.begin());
      a.thetas.push_back(a.learner.iterate);
      continue;
    }
    const auto& sig = a.signal(hist);
    const bool drc = a.options.policy == PolicyClass::drc;
    std::vector<const Trajectoryd*> signals(sys.num_agents(), &sig);
    const PeoContext ctx = make_peo_context(t, a.burn_in, a.markov, drc ? *a.options.observation_cost : cost,
                                            drc ? a.ynat.back() : hist.xnat.back(), signals, a.options.m, hist.u);
    rec.oracle_values[a.index] = local_peo_eval(ctx, a.index, a.thetas);
    const auto grads = local_peo_grad(ctx, a.index, a.thetas);
    a.learner = ogd_step(std::move(a.learner), block_sum(grads), window_inner(grads, a.thetas));
    a.thetas.erase(a.thetas.begin());
    a.thetas.push_back(a.learner.iterate);
  }
  return rec;
}

GpcState make_gpc(StabilizedPlant plant, const AgentOptions& options) {
  check_options(options);
  require(options.policy == PolicyClass::dac, "make_gpc: GPC uses disturbance-action policies");
  GpcState s{std::move(plant), options, 0, {}, {}, {}};
  s.burn_in = options.effective_burn_in();
  const auto& sys = s.plant.closed;
  s.markov = build_markov(LinearSystemd::single(sys.A(), sys.B()), options.h);
  const Index rows = sys.input_dim(), cols = static_cast<Index>(options.m) * sys.state_dim();
  s.learner = LearnerState(BallDomain(options.radius, rows, cols), options.schedule, initial_theta(options, rows, cols));
  return s;
}

StepRecord gpc_step(GpcState& state, long t, const Observation& obs, const StageCost& cost,
                    const std::vector<bool>& failed) {
  const auto& sys = state.plant.closed;
  auto& hist = state.history;
  observe_state(hist, sys, t, obs.x);

  StepRecord rec;
  rec.thetas.push_back(state.theta());
  rec.oracle_values.assign(1, kNaN);
  rec.intended = VectorXd::Zero(sys.input_dim());
  if (t >= state.burn_in) rec.intended = state.theta() * stack_window(hist.w, t, state.options.m, sys.state_dim());
  rec.applied = apply_failures(state.plant, obs.x, rec.intended, failed);
  hist.u.push_back(rec.intended);

  if (t >= state.burn_in) {
    const int h = state.options.h;
    const PeoContext ctx =
        make_peo_context(t, state.burn_in, state.markov, cost, hist.xnat.back(), {&hist.w}, state.options.m, hist.u);
    const ThetaWindow repeated(static_cast<std::size_t>(h) + 1, state.theta());
    rec.oracle_values[0] = local_peo_eval(ctx, 0, repeated);
    state.learner = ogd_step(std::move(state.learner), block_sum(local_peo_grad(ctx, 0, repeated)));
  }
  return rec;
}

}  // namespace mactl
