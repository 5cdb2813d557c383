#include <gtest/gtest.h>

#include <sstream>

#include "mactl/policies.hpp"
#include "test_support.hpp"

using namespace mactl;
using mactl::testing::gaussian_matrix;

TEST(Window, MostRecentFirstWithZeroPadding) {
  Trajectoryd s;
  for (int t = 0; t < 5; ++t) s.push_back(VectorXd::Constant(2, t + 1.0));
  const VectorXd w = stack_window(s, 2, 3, 2);
  VectorXd expect(6);
  expect << 2, 2, 1, 1, 0, 0;
  EXPECT_EQ(w, expect);
  EXPECT_EQ(stack_window(s, 0, 2, 2), VectorXd::Zero(4));
}

TEST(Dac, ControlIsLinearInWindow) {
  std::mt19937_64 rng(1);
  const DacPolicyd p(gaussian_matrix(rng, 2, 6), 3);
  Trajectoryd w;
  for (int t = 0; t < 10; ++t) w.push_back(mactl::testing::gaussian_vector(rng, 2));
  const VectorXd u = dac_control(p, w, 7);
  VectorXd expect = VectorXd::Zero(2);
  for (int j = 1; j <= 3; ++j) expect += p.M.middleCols(2 * (j - 1), 2) * w[static_cast<std::size_t>(7 - j)];
  EXPECT_LE((u - expect).norm(), 1e-14);
  EXPECT_THROW(DacPolicyd(MatrixXd::Zero(1, 5), 2), InvalidInput);
}

TEST(Simulate, FeedbackAndOpenLoopMatchHandRollout) {
  std::mt19937_64 rng(2);
  const auto sys = mactl::testing::random_plant(rng, 2, {1, 1}, 0.7);
  const auto trace = generate_disturbances(DisturbanceProfile::gaussian, 3, 20, 2);
  LinearFeedbackd K{gaussian_matrix(rng, 1, 2, 0.1)};
  OpenLoopPolicyd ol{{}, 1};
  for (int t = 0; t < 10; ++t) ol.schedule.push_back(VectorXd::Constant(1, 0.1 * t));
  const auto roll = simulate_policies(sys, {K, ol}, trace);
  VectorXd x = VectorXd::Zero(2);
  for (std::size_t t = 0; t < 20; ++t) {
    EXPECT_LE((roll.x[t] - x).norm(), 1e-12);
    VectorXd u(2);
    u << -(K.K * x)(0), ol.control(static_cast<long>(t))(0);
    x = step_dynamics(sys, x, u, trace.w[t]);
  }
}

TEST(Decoupling, VaryingOneDacAgentLeavesOthersBitIdentical) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = std::uniform_int_distribution<int>(2, 4)(rng);
    std::vector<Index> widths(static_cast<std::size_t>(k));
    for (auto& w : widths) w = std::uniform_int_distribution<Index>(1, 2)(rng);
    const Index dx = std::uniform_int_distribution<Index>(1, 4)(rng);
    const auto sys = mactl::testing::random_plant(rng, dx, widths, 0.9);
    const int m = std::uniform_int_distribution<int>(1, 4)(rng);
    const auto trace = generate_disturbances(DisturbanceProfile::gaussian, static_cast<std::uint64_t>(trial), 50, dx);
    std::vector<AgentPolicy> policies;
    for (int i = 0; i < k; ++i)
      policies.emplace_back(DacPolicyd(gaussian_matrix(rng, widths[static_cast<std::size_t>(i)], m * dx), m));
    const std::size_t varied = std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(k - 1))(rng);
    const AgentPolicy alt = DacPolicyd(gaussian_matrix(rng, widths[varied], m * dx, 5.0), m);

    // Independent replay: other agents' controls depend only on w.
    const auto a = simulate_policies(sys, policies, trace);
    auto changed = policies;
    changed[varied] = alt;
    const auto b = simulate_policies(sys, changed, trace);
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
      if (i == varied) continue;
      for (std::size_t t = 0; t < 50; ++t) ASSERT_EQ(a.agent_controls[i][t], b.agent_controls[i][t]);
    }
    EXPECT_TRUE(decoupling_check(policies, varied, alt, sys, trace));
  }
}

TEST(Decoupling, FeedbackAgentsAreCoupled) {
  std::mt19937_64 rng(5);
  const auto sys = mactl::testing::random_plant(rng, 2, {1, 1}, 0.8);
  const auto trace = generate_disturbances(DisturbanceProfile::gaussian, 1, 30, 2);
  std::vector<AgentPolicy> policies{LinearFeedbackd{gaussian_matrix(rng, 1, 2, 0.2)},
                                    DacPolicyd(gaussian_matrix(rng, 1, 2), 1)};
  EXPECT_FALSE(decoupling_check(policies, 1, DacPolicyd(gaussian_matrix(rng, 1, 2, 3.0), 1), sys, trace));
}

TEST(MatrixIo, RoundTripIsExact) {
  std::mt19937_64 rng(6);
  const MatrixXd M = gaussian_matrix(rng, 3, 4, 1e3);
  std::stringstream ss;
  write_matrix(ss, M);
  EXPECT_EQ(read_matrix(ss), M);
}

TEST(MatrixIo, RejectsMalformedText) {
  std::stringstream a("matrix 2 2\n1 2\n3\n");
  EXPECT_THROW(read_matrix(a), InvalidInput);
  std::stringstream b("tensor 1 1\n1\n");
  EXPECT_THROW(read_matrix(b), InvalidInput);
}
