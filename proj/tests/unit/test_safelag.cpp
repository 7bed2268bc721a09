#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lanesafe/error.hpp"
#include "lanesafe/safelag/cost_estimator.hpp"
#include "lanesafe/safelag/pid_lagrangian.hpp"

using namespace lanesafe;
using namespace lanesafe::safelag;

TEST(CostEstimator, CountsEpisodeCost) {
  CostEstimator est;
  for (int i = 0; i < 10; ++i) est.accumulate_step_cost(0.0);
  EXPECT_EQ(est.current_episode_total(), 0.0);
  EXPECT_EQ(est.finish_episode(), 0.0);
  for (int i = 0; i < 10; ++i) est.accumulate_step_cost(i % 3 == 0 && i < 9 ? 1.0 : 0.0);
  EXPECT_EQ(est.current_episode_total(), 3.0);
}

TEST(CostEstimator, OrderInvariant) {
  const std::vector<double> costs{1, 0, 0, 1, 1, 0, 1};
  CostEstimator a, b;
  for (double c : costs) a.accumulate_step_cost(c);
  for (auto it = costs.rbegin(); it != costs.rend(); ++it) b.accumulate_step_cost(*it);
  EXPECT_EQ(a.current_episode_total(), b.current_episode_total());
}

TEST(CostEstimator, RejectsNegativeCost) {
  CostEstimator est;
  EXPECT_THROW(est.accumulate_step_cost(-1.0), ValidationError);
  EXPECT_THROW(est.accumulate_step_cost(std::nan("")), ValidationError);
}

TEST(CostEstimator, WindowMeanAndEviction) {
  CostEstimator est(10);
  est.accumulate_step_cost(5.0);
  EXPECT_EQ(est.finish_episode(), 5.0);

  CostEstimator two(10);
  two.accumulate_step_cost(2.0);
  two.finish_episode();
  two.accumulate_step_cost(4.0);
  EXPECT_EQ(two.finish_episode(), 3.0);
  EXPECT_EQ(two.current_episode_total(), 0.0);

  CostEstimator ring(10);
  for (int i = 0; i < 10; ++i) {
    ring.accumulate_step_cost(static_cast<double>(i));
    ring.finish_episode();
  }
  EXPECT_EQ(ring.count(), 10u);
  ring.accumulate_step_cost(100.0);
  ring.finish_episode();
  EXPECT_EQ(ring.count(), 10u);
  EXPECT_EQ(ring.totals().front(), 1.0);
  EXPECT_EQ(ring.totals().back(), 100.0);
  EXPECT_DOUBLE_EQ(ring.estimate(), (45.0 - 0.0 + 100.0) / 10.0);
}

TEST(PidUpdate, ZeroErrorFixedPoint) {
  PidDualState s;
  s.lambda = 0.37;
  s.cost_limit = 2.0;
  s.previous_cost = 2.0;
  const auto n = pid_update(s, {}, 2.0);
  EXPECT_EQ(n.lambda, 0.37);
  EXPECT_EQ(n.integral, 0.0);
}

TEST(PidUpdate, HandEvaluationWithDefaultGains) {
  PidDualState s;  // lambda 0.001, d 0, I 0, J_prev 0
  const auto n = pid_update(s, {2e-6, 2e-7, 1e-7}, 10.0);
  EXPECT_EQ(n.last_error, 10.0);
  EXPECT_EQ(n.integral, 10.0);
  EXPECT_EQ(n.last_delta, 10.0);
  EXPECT_NEAR(n.lambda, 0.001023, 1e-12);
  EXPECT_NEAR(n.lambda, 0.001 + 2e-5 + 2e-6 + 1e-6, 1e-15);
  EXPECT_EQ(n.previous_cost, 10.0);
}

TEST(PidUpdate, ClampsAtZero) {
  PidDualState s;
  s.lambda = 0.01;
  s.cost_limit = 100.0;
  const auto n = pid_update(s, {1.0, 0.0, 0.0}, 0.0);
  EXPECT_EQ(n.lambda, 0.0);
}

TEST(PidUpdate, RejectsNonFiniteCost) {
  EXPECT_THROW(pid_update({}, {}, std::nan("")), ValidationError);
}

TEST(PidUpdate, IntegralOnlyGrowsQuadraticallyAndProportionalLinearly) {
  PidDualState i_only, p_only;
  i_only.lambda = p_only.lambda = 0.0;
  std::vector<double> li, lp;
  for (int k = 1; k <= 20; ++k) {
    i_only = pid_update(i_only, {0.0, 1.0, 0.0}, 1.0);
    p_only = pid_update(p_only, {1.0, 0.0, 0.0}, 1.0);
    EXPECT_DOUBLE_EQ(i_only.lambda, k * (k + 1) / 2.0);
    EXPECT_DOUBLE_EQ(p_only.lambda, static_cast<double>(k));
  }
}

TEST(PidUpdate, IntegralEqualsRunningErrorSum) {
  PidDualState s;
  s.cost_limit = 1.0;
  double sum = 0.0;
  for (double j : {3.0, 0.5, 2.0, 1.0, 7.0}) {
    s = pid_update(s, {}, j);
    sum += j - 1.0;
    EXPECT_DOUBLE_EQ(s.integral, sum);
    EXPECT_GE(s.lambda, 0.0);
  }
}

TEST(IntegralUpdate, HandValueAndFixedPoint) {
  PidDualState s;
  s.lambda = 0.0;
  EXPECT_DOUBLE_EQ(integral_update(s, 0.1, 1.0).lambda, 0.1);
  s.lambda = 0.4;
  s.cost_limit = 2.0;
  EXPECT_EQ(integral_update(s, 0.1, 2.0).lambda, 0.4);
  EXPECT_EQ(integral_update(s, 1.0, 0.0).lambda, 0.0);
}

TEST(IntegralUpdate, DiffersFromPidWithIntegralGainOnly) {
  // Same step size used as the PID integral gain: the PID integral term acts on
  // the accumulated error, so the two updates separate after the first step.
  PidDualState a, b;
  a.lambda = b.lambda = 0.0;
  for (int k = 0; k < 3; ++k) {
    a = integral_update(a, 0.1, 1.0);
    b = pid_update(b, {0.0, 0.1, 0.0}, 1.0);
  }
  EXPECT_NE(a.lambda, b.lambda);
  EXPECT_LT(a.lambda, b.lambda);
}

TEST(PidGains, NegativeGainsAreRejected) {
  EXPECT_THROW((PidGains{-1.0, 0.0, 0.0}.validate()), ConfigError);
}
