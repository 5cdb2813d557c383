#include "mactl/policies.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace mactl {

namespace {

struct ControlVisitor {
  const LinearSystemd& sys;
  const DisturbanceTrace& trace;
  const Trajectoryd& x;
  const Trajectoryd& ynat;
  std::size_t agent;
  long t;

  VectorXd operator()(const DacPolicyd& p) const { return dac_control(p, trace.w, t); }
  VectorXd operator()(const DrcPolicyd& p) const { return drc_control(p, ynat, t); }
  VectorXd operator()(const LinearFeedbackd& f) const { return feedback_control(f, x[static_cast<std::size_t>(t)]); }
  VectorXd operator()(const OpenLoopPolicyd& p) const { return p.control(t); }
};

}  // namespace

JointRollout simulate_policies(const LinearSystemd& sys, const std::vector<AgentPolicy>& policies,
                               const DisturbanceTrace& trace) {
  require(policies.size() == sys.num_agents(), "simulate_policies: need one policy per agent");
  const std::size_t T = trace.horizon();
  std::vector<Trajectoryd> ynat(sys.num_agents());
  for (std::size_t i = 0; i < sys.num_agents(); ++i)
    if (std::holds_alternative<DrcPolicyd>(policies[i]))
      ynat[i] = natures_y(sys, trace.w, i < trace.e.size() ? trace.e[i] : Trajectoryd{}, i);

  JointRollout out;
  out.x.reserve(T + 1);
  out.x.push_back(VectorXd::Zero(sys.state_dim()));
  out.agent_controls.assign(sys.num_agents(), {});
  std::vector<VectorXd> parts(sys.num_agents());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < sys.num_agents(); ++i) {
      parts[i] = std::visit(ControlVisitor{sys, trace, out.x, ynat[i], i, static_cast<long>(t)}, policies[i]);
      require(parts[i].size() == sys.input_dim(i), "simulate_policies: policy output dimension mismatch");
      out.agent_controls[i].push_back(parts[i]);
    }
    out.x.push_back(step_dynamics(sys, out.x.back(), join_controls(sys, parts), trace.w[t]));
  }
  return out;
}

bool decoupling_check(const std::vector<AgentPolicy>& policies, std::size_t varied, const AgentPolicy& alternative,
                      const LinearSystemd& sys, const DisturbanceTrace& trace) {
  require(varied < policies.size(), "decoupling_check: varied agent out of range");
  auto other = policies;
  other[varied] = alternative;
  const auto a = simulate_policies(sys, policies, trace);
  const auto b = simulate_policies(sys, other, trace);
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (i == varied) continue;
    for (std::size_t t = 0; t < a.agent_controls[i].size(); ++t) {
      const auto& ua = a.agent_controls[i][t];
      const auto& ub = b.agent_controls[i][t];
      for (Index j = 0; j < ua.size(); ++j)
        if (!(ua(j) == ub(j))) return false;
    }
  }
  return true;
}

void write_matrix(std::ostream& os, const MatrixXd& M) {
  os << "matrix " << M.rows() << ' ' << M.cols() << '\n';
  char buf[64];
  for (Index r = 0; r < M.rows(); ++r) {
    for (Index c = 0; c < M.cols(); ++c) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), M(r, c));
      if (c) os << ' ';
      os.write(buf, end - buf);
    }
    os << '\n';
  }
}

MatrixXd read_matrix(std::istream& is) {
  std::string tag;
  long rows = -1, cols = -1;
  is >> tag >> rows >> cols;
  require(is && tag == "matrix" && rows >= 0 && cols >= 0, "read_matrix: malformed header");
  MatrixXd M(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      std::string token;
      is >> token;
      require(static_cast<bool>(is), "read_matrix: truncated matrix body");
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      require(ec == std::errc() && ptr == token.data() + token.size(), "read_matrix: malformed entry '" + token + "'");
      M(r, c) = v;
    }
  return M;
}

}  // namespace mactl
