#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "mactl/oco.hpp"
#include "test_support.hpp"

using namespace mactl;
using mactl::testing::gaussian_matrix;
using mactl::testing::gaussian_vector;

TEST(Ball, ProjectionIsNearestPoint) {
  std::mt19937_64 rng(1);
  const BallDomain ball(2.0, 3, 2);
  for (int i = 0; i < 100; ++i) {
    const MatrixXd x = gaussian_matrix(rng, 3, 2, 2.0);
    const MatrixXd p = ball.project(x);
    EXPECT_TRUE(ball.contains(p));
    if (x.norm() <= 2.0) {
      EXPECT_EQ(p, x);
    } else {
      EXPECT_NEAR(p.norm(), 2.0, 1e-12);
      // Nearest point: no random point of the ball is closer.
      for (int j = 0; j < 20; ++j) {
        MatrixXd y = gaussian_matrix(rng, 3, 2);
        y = ball.project(y * (2.0 * std::uniform_real_distribution<double>(0, 1)(rng) / std::max(y.norm(), 1e-12)));
        EXPECT_LE((x - p).norm(), (x - y).norm() + 1e-12);
      }
    }
  }
}

TEST(Schedule, Values) {
  EXPECT_DOUBLE_EQ(StepSchedule::constant(0.3)(7, 1.0, 1.0), 0.3);
  EXPECT_DOUBLE_EQ(StepSchedule::inv_t(0.001, 10)(1, 1.0, 1.0), 0.001 / 11);
  EXPECT_DOUBLE_EQ(StepSchedule::inv_sqrt_t(2.0)(4, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(StepSchedule::anytime()(4, 2.0, 6.0), 1.5);
  EXPECT_THROW(StepSchedule::constant(1.0)(0, 1.0, 1.0), InvalidInput);
}

TEST(Ledger, MatchesBruteForceSums) {
  std::mt19937_64 rng(2);
  RegretLedger ledger;
  std::vector<MatrixXd> gs, xs;
  std::vector<double> windows;
  for (int t = 0; t < 200; ++t) {
    gs.push_back(gaussian_matrix(rng, 2, 3));
    xs.push_back(gaussian_matrix(rng, 2, 3));
    windows.push_back(gaussian_vector(rng, 1)(0));
    ledger.record(gs.back(), xs.back(), windows.back());
  }
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd z = gaussian_matrix(rng, 2, 3);
    double lin = 0.0, mem = 0.0;
    for (std::size_t t = 0; t < gs.size(); ++t) {
      lin += (gs[t].array() * (xs[t] - z).array()).sum();
      mem += windows[t] - (gs[t].array() * z.array()).sum();
    }
    EXPECT_NEAR(ledger.linear_regret(z), lin, 1e-9);
    EXPECT_NEAR(ledger.memory_regret(z), mem, 1e-9);
  }
}

TEST(Ogd, StepIsProjectedGradientStep) {
  LearnerState s(BallDomain(1.0, 2, 1), StepSchedule::constant(0.5));
  MatrixXd g(2, 1);
  g << -4.0, 0.0;
  s = ogd_step(s, g);
  EXPECT_NEAR(s.iterate(0), 1.0, 1e-15);
  EXPECT_EQ(s.t, 1);
  EXPECT_EQ(s.ledger.rounds, 1);
  EXPECT_THROW(ogd_step(s, MatrixXd::Constant(2, 1, std::nan(""))), InvalidInput);
  EXPECT_THROW(ogd_step(s, MatrixXd::Zero(3, 1)), InvalidInput);
}

TEST(Ogd, LinearRegretWithinStandardBound) {
  // |regret| <= D^2/(2 eta_T) + sum eta_t G^2 / 2 for eta_t = D/(G sqrt t), D the diameter.
  std::mt19937_64 rng(3);
  const double R = 1.0, G = 1.0;
  LearnerState s(BallDomain(R, 3, 1), StepSchedule::inv_sqrt_t(2.0 * R / G));
  const long T = 5000;
  for (long t = 0; t < T; ++t) {
    VectorXd g = gaussian_vector(rng, 3);
    g /= std::max(1.0, g.norm());
    s = ogd_step(s, g);
  }
  const MatrixXd zstar = -R * s.ledger.gradient_sum / s.ledger.gradient_sum.norm();
  EXPECT_LE(s.ledger.linear_regret(zstar), 3.0 * 2.0 * R * G * std::sqrt(static_cast<double>(T)));
}

TEST(BestInHindsight, GridAndDescentAgreeWithClosedForm) {
  Objective f;
  f.value = [](const VectorXd& z) { return (z(0) - 0.3) * (z(0) - 0.3) + 2.0 * (z(1) + 2.0) * (z(1) + 2.0); };
  f.gradient = [](const VectorXd& z) {
    VectorXd g(2);
    g << 2.0 * (z(0) - 0.3), 4.0 * (z(1) + 2.0);
    return g;
  };
  const ProductDomain dom{{BallDomain(1.0, 1, 1), BallDomain(1.0, 1, 1)}};
  const auto r = best_in_hindsight(f, dom);
  EXPECT_NEAR(r.argmin(0), 0.3, 1e-6);
  EXPECT_NEAR(r.argmin(1), -1.0, 1e-6);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(ProductDomain, ProjectsEachBlockSeparately) {
  const ProductDomain dom{{BallDomain(1.0, 2, 1), BallDomain(3.0, 1, 1)}};
  VectorXd x(3);
  x << 3, 4, -5;
  const VectorXd p = dom.project(x);
  EXPECT_NEAR(p(0), 0.6, 1e-15);
  EXPECT_NEAR(p(1), 0.8, 1e-15);
  EXPECT_NEAR(p(2), -3.0, 1e-15);
  EXPECT_TRUE(dom.contains(p));
}

namespace {

QuadraticMemoryLoss random_memory_loss(std::mt19937_64& rng, Index dim, int h) {
  const Index n = dim * (h + 1);
  const MatrixXd L = gaussian_matrix(rng, n, n, 1.0 / std::sqrt(static_cast<double>(n)));
  QuadraticMemoryLoss l;
  l.P = L * L.transpose();
  l.q = gaussian_vector(rng, n);
  l.c = 0.0;
  l.dim = dim;
  l.h = h;
  return l;
}

}  // namespace

TEST(MemoryLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const auto l = random_memory_loss(rng, 3, 2);
  std::vector<VectorXd> win{gaussian_vector(rng, 3), gaussian_vector(rng, 3), gaussian_vector(rng, 3)};
  const auto g = l.gradient(win);
  const double eps = 1e-6;
  for (std::size_t r = 0; r < 3; ++r)
    for (Index i = 0; i < 3; ++i) {
      auto hi = win, lo = win;
      hi[r](i) += eps;
      lo[r](i) -= eps;
      EXPECT_NEAR(g[r](i), (l(hi) - l(lo)) / (2 * eps), 1e-6);
    }
  const auto col = l.collapsed();
  const VectorXd x = gaussian_vector(rng, 3);
  EXPECT_NEAR(col({x}), l({x, x, x}), 1e-12);
}

// Multiplayer OCO with memory: on convex losses the joint regret against any
// fixed comparator is at most the sum of the learners' window-form linear regrets.
TEST(MultiplayerOcoWithMemory, RegretBoundedBySumOfLedgersOnRandomInstances) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240612);
  for (int inst = 0; inst < 20; ++inst) {
    const int k = std::uniform_int_distribution<int>(2, 3)(rng);
    const int h = std::uniform_int_distribution<int>(1, 4)(rng);
    const long T = 300;
    std::vector<LearnerState> learners;
    Index dim = 0;
    for (int i = 0; i < k; ++i) {
      const Index n = std::uniform_int_distribution<Index>(1, 3)(rng);
      dim += n;
      learners.emplace_back(BallDomain(1.0, n, 1), StepSchedule::inv_sqrt_t(0.2), gaussian_matrix(rng, n, 1, 0.3));
    }
    std::vector<QuadraticMemoryLoss> losses;
    for (long t = 0; t < T; ++t) losses.push_back(random_memory_loss(rng, dim, h));

    DecisionWindow window(h);
    JointDecision first;
    for (const auto& l : learners) first.parts.push_back(l.iterate);
    window.pad_with(first);
    std::vector<JointDecision> played;
    for (long t = 0; t < T; ++t) {
      const auto& loss = losses[static_cast<std::size_t>(t)];
      const WindowGradientOracle oracle = [&](const std::deque<JointDecision>& slots) {
        std::vector<VectorXd> flat;
        for (const auto& s : slots) flat.push_back(s.concat());
        const auto g = loss.gradient(flat);
        std::vector<std::vector<MatrixXd>> out(learners.size());
        for (const auto& gr : g) {
          const auto parts = split_decision(gr, learners);
          for (std::size_t i = 0; i < learners.size(); ++i) out[i].push_back(parts.parts[i]);
        }
        return out;
      };
      played.push_back(multiplayer_ocom_round(learners, window, oracle));
    }

    std::vector<MemoryLoss> mls;
    for (const auto& l : losses) mls.push_back(l.as_memory_loss());
    const auto report = eval_multiagent_regret(mls, played, h, collapsed_sum_objective(losses), [&](const Objective& f) {
      return best_in_hindsight(f, product_domain(learners));
    });

    // Brute-force regret against the reported comparator.
    double alg = 0.0, comp = 0.0;
    const std::vector<VectorXd> rep(static_cast<std::size_t>(h) + 1, report.comparator);
    for (long t = 0; t < T; ++t) {
      alg += losses[static_cast<std::size_t>(t)](window_at(played, static_cast<std::size_t>(t), h));
      comp += losses[static_cast<std::size_t>(t)](rep);
    }
    EXPECT_NEAR(report.average_regret, (alg - comp) / static_cast<double>(T), 1e-9);

    const auto zs = split_decision(report.comparator, learners);
    double ledger = 0.0;
    for (std::size_t i = 0; i < learners.size(); ++i) ledger += learners[i].ledger.memory_regret(zs.parts[i]);
    EXPECT_LE(alg - comp, ledger + 1e-9 * static_cast<double>(T)) << "instance " << inst;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 30.0);
}
