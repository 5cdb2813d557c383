#pragma once

#include <random>

#include "mactl/peo.hpp"
#include "mactl/policies.hpp"
#include "test_support.hpp"

namespace mactl::testing {

/// Closed-loop history with every agent playing its own sequence of DAC
/// matrices, plus everything the rollout oracle needs.
struct Scenario {
  LinearSystemd sys;
  int m = 0;
  long T = 0;
  Trajectoryd w, x, u;
  std::vector<std::vector<MatrixXd>> played;  // [agent][t]
};

inline Scenario make_scenario(std::mt19937_64& rng, LinearSystemd sys, int m, long T) {
  Scenario s{std::move(sys), m, T, {}, {}, {}, {}};
  const Index dx = s.sys.state_dim();
  s.played.resize(s.sys.num_agents());
  s.x.push_back(VectorXd::Zero(dx));
  for (long t = 0; t < T; ++t) {
    s.w.push_back(gaussian_vector(rng, dx));
    std::vector<VectorXd> parts;
    for (std::size_t i = 0; i < s.sys.num_agents(); ++i) {
      s.played[i].push_back(gaussian_matrix(rng, s.sys.input_dim(i), m * dx, 0.3));
      parts.push_back(s.played[i].back() * stack_window(s.w, t, m, dx));
    }
    s.u.push_back(join_controls(s.sys, parts));
    s.x.push_back(step_dynamics(s.sys, s.x.back(), s.u.back(), s.w.back()));
  }
  return s;
}

inline PeoContext context_at(const Scenario& s, long t, int h, const QuadCostd& c) {
  const auto xnat = natures_x(s.sys, s.w);
  std::vector<const Trajectoryd*> signals(s.sys.num_agents(), &s.w);
  return make_peo_context(t, 0, build_markov(s.sys, h), c, xnat[static_cast<std::size_t>(t)], signals, s.m, s.u);
}

/// Replays the true system from x_{t-h} with agent i's controls regenerated.
inline double rollout_cost(const Scenario& s, long t, int h, std::size_t agent, const ThetaWindow& thetas, const QuadCostd& c) {
  const Index dx = s.sys.state_dim();
  VectorXd x = s.x[static_cast<std::size_t>(t - h)];
  VectorXd u_t;
  for (long q = t - h; q <= t; ++q) {
    VectorXd u = s.u[static_cast<std::size_t>(q)];
    u.segment(s.sys.input_offset(agent), s.sys.input_dim(agent)) =
        thetas[static_cast<std::size_t>(q - (t - h))] * stack_window(s.w, q, s.m, dx);
    if (q == t) {
      u_t = u;
      break;
    }
    x = step_dynamics(s.sys, x, u, s.w[static_cast<std::size_t>(q)]);
  }
  return c(x, u_t);
}

inline ThetaWindow random_window(std::mt19937_64& rng, const Scenario& s, std::size_t agent, int h) {
  ThetaWindow th;
  for (int k = 0; k <= h; ++k)
    th.push_back(gaussian_matrix(rng, s.sys.input_dim(agent), s.m * s.sys.state_dim(), 0.5));
  return th;
}


}  // namespace mactl::testing
