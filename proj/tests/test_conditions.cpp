#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cks/conditions.hpp"
#include "cks/errors.hpp"
#include "cks/genfun.hpp"
#include "oracles.hpp"

using namespace cks;

namespace {

std::vector<WeightSequence> families() {
  std::vector<WeightSequence> out;
  for (double beta : {0.0, 0.25, 0.5, 0.75}) out.push_back(make_factorial_power(beta));
  for (int k : {2, 3, 4}) out.push_back(make_bell(k));
  return out;
}

void expect_consistent(const ConditionReport& r) {
  if (r.verdict == Verdict::fails_at) {
    ASSERT_TRUE(r.fail_at.has_value());
    EXPECT_LT(r.margins.at(static_cast<std::size_t>(*r.fail_at - r.margin_offset)), 0.0);
  }
  if (r.verdict == Verdict::holds_on_window) {
    for (double m : r.margins) EXPECT_GE(m, -kConvexityTolerance);
  }
}

}  // namespace

TEST(A1, ConstantAndFactorialPower) {
  const auto c = check_A1(make_constant());
  EXPECT_EQ(c.verdict, Verdict::holds_on_window);
  EXPECT_TRUE(c.window_limited);
  for (double m : c.margins) EXPECT_EQ(m, 1.0);
  EXPECT_EQ(check_A1(make_factorial_power(0.5)).verdict, Verdict::holds_on_window);
}

TEST(A1, NonIncreasingCustomStillPositive) {
  // alpha(n) = 2^{-n} is positive on every window but its infimum is 0: the
  // verdict can only speak for the window.
  std::vector<double> logs(50);
  for (int n = 0; n < 50; ++n) logs[n] = -n * std::log(2.0);
  const auto r = check_A1(make_custom(logs), {0, 49});
  EXPECT_EQ(r.verdict, Verdict::holds_on_window);
  EXPECT_TRUE(r.window_limited);
}

TEST(A2, ConstantMatchesStirling) {
  const auto r = check_A2(make_constant());
  EXPECT_EQ(r.verdict, Verdict::holds_on_window);
  const double s100 = r.values.at(static_cast<std::size_t>(100 - r.value_offset));
  EXPECT_NEAR(s100, -oracle::log_factorial(100) / 100.0, 1e-12);
  EXPECT_NEAR(s100, -3.637, 1e-3);
  const auto t = check_A2_tilde(make_constant());
  ASSERT_EQ(r.values.size(), t.values.size());
  for (std::size_t i = 0; i < r.values.size(); ++i) EXPECT_EQ(r.values[i], t.values[i]);
}

TEST(A2, FactorialPowerFormula) {
  for (double beta : {0.25, 0.5, 0.75}) {
    const auto r = check_A2(make_factorial_power(beta));
    EXPECT_EQ(r.verdict, Verdict::holds_on_window);
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      const int n = r.value_offset + static_cast<int>(i);
      if (n == 0) continue;
      EXPECT_NEAR(r.values[i], (beta - 1.0) * oracle::log_factorial(n) / n, 1e-12 * (1 + std::abs(r.values[i])));
    }
  }
}

TEST(A2, ShortWindowRejected) { EXPECT_THROW(check_A2(make_constant(), {0, 5}), ValidationError); }

TEST(A2, SlowLimitIsInconclusive) {
  // alpha(n) = n!: s(n) = 0 for every n, never below ln(1/2).
  std::vector<double> logs(101);
  for (int n = 0; n <= 100; ++n) logs[n] = oracle::log_factorial(n);
  const auto r = check_A2(make_custom(logs), {0, 100});
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
}

TEST(LogConvexity, EqualityCaseAndTolerance) {
  const auto r = check_B3(make_constant());
  EXPECT_EQ(r.verdict, Verdict::holds_on_window);
  for (double m : r.margins) EXPECT_EQ(m, 0.0);
  const std::vector<double> concave{0.0, 1.0, 1.5, 1.7};
  const auto bad = check_logconvex(concave, Condition::B3);
  EXPECT_EQ(bad.verdict, Verdict::fails_at);
  EXPECT_EQ(*bad.fail_at, 0);
  expect_consistent(bad);
  EXPECT_THROW(check_logconvex(std::vector<double>{0.0, 1.0}, Condition::B3), ValidationError);
}

TEST(LogConvexity, BellOrdersOnFullWindow) {
  for (int k : {2, 3, 4}) {
    const auto ws = make_bell(k);
    const auto b2 = check_B2(ws);
    const auto b3 = check_B3(ws);
    EXPECT_EQ(b2.verdict, Verdict::holds_on_window) << k;
    EXPECT_EQ(b3.verdict, Verdict::holds_on_window) << k;
    EXPECT_EQ(b2.window.hi, 300);
    expect_consistent(b2);
    expect_consistent(b3);
  }
}

TEST(LogConvexity, FactorialPowerB2ReducesToLogConvexityOfFactorial) {
  for (double beta : {0.25, 0.5, 0.75}) {
    const auto r = check_B2(make_factorial_power(beta));
    EXPECT_EQ(r.verdict, Verdict::holds_on_window);
    for (std::size_t i = 0; i < r.margins.size(); ++i) {
      const int n = r.margin_offset + static_cast<int>(i);
      const double convexity_of_factorial = std::log((n + 2.0) / (n + 1.0));
      EXPECT_NEAR(r.margins[i], (1.0 - beta) * convexity_of_factorial, 1e-12);
    }
  }
}

TEST(LogConvexity, EvaluationOrderInvariance) {
  // Margins computed from reversed sequences (negated offsets) agree to 1e-13.
  for (const auto& ws : families()) {
    const auto fwd = check_B3(ws);
    std::vector<double> rev(ws.log_alpha().begin(), ws.log_alpha().begin() + 301);
    std::reverse(rev.begin(), rev.end());
    const auto bwd = check_logconvex(rev, Condition::B3);
    ASSERT_EQ(fwd.margins.size(), bwd.margins.size());
    for (std::size_t i = 0; i < fwd.margins.size(); ++i) {
      EXPECT_NEAR(fwd.margins[i], bwd.margins[bwd.margins.size() - 1 - i], 1e-13 * std::max(1.0, std::abs(ws.log_alpha(300))));
    }
  }
}

TEST(Limsup, ConstantThetaEstimate) {
  const auto ws = make_constant();
  const auto r = estimate_limsup(ws, Condition::B1t, {1, 100});
  const double x100 = r.values.at(static_cast<std::size_t>(100 - r.value_offset));
  const double want = (oracle::log_factorial(100) + 100.0 - 100.0 * std::log(100.0)) / 100.0;
  EXPECT_NEAR(x100, want, 1e-10);
  EXPECT_NEAR(x100, 0.0325, 1e-3);
  ASSERT_TRUE(r.limsup_estimate && r.log_limsup_estimate);
  EXPECT_NEAR(std::log(*r.limsup_estimate), *r.log_limsup_estimate, 1e-14);
  EXPECT_TRUE(r.window_limited);

  const auto b1 = estimate_limsup(ws, Condition::B1, {1, 100});
  ASSERT_EQ(b1.values.size(), r.values.size());
  for (std::size_t i = 0; i < r.values.size(); ++i) EXPECT_NEAR(b1.values[i], r.values[i], 1e-12);
}

TEST(Limsup, FactorialPowerFinite) {
  const auto r = estimate_limsup(make_factorial_power(0.5), Condition::B1, {50, 100});
  ASSERT_TRUE(r.limsup_estimate.has_value());
  EXPECT_TRUE(std::isfinite(*r.limsup_estimate));
  EXPECT_GT(*r.limsup_estimate, 0.0);
  EXPECT_THROW(estimate_limsup(make_constant(), Condition::B2), ValidationError);
}

TEST(Implications, NoViolationsOnTestedFamilies) {
  for (const auto& ws : families()) {
    for (const auto& chk : check_implications(ws)) {
      EXPECT_FALSE(chk.violated) << to_string(chk.antecedent) << " => " << to_string(chk.consequent);
    }
  }
}

TEST(Implications, BellB3ImpliesB2Tilde) {
  const auto checks = check_implications(make_bell(2));
  const auto it = std::find_if(checks.begin(), checks.end(), [](const ImplicationCheck& c) {
    return c.antecedent == Condition::B3 && c.consequent == Condition::B2t;
  });
  ASSERT_NE(it, checks.end());
  EXPECT_EQ(it->antecedent_report.verdict, Verdict::holds_on_window);
  EXPECT_EQ(it->consequent_report.verdict, Verdict::holds_on_window);
}

TEST(Implications, ConvexAndTildeConcaveCoOccur) {
  for (const auto& ws : families()) {
    EXPECT_EQ(check_B3(ws).verdict == Verdict::holds_on_window,
              check_B2_tilde(ws).verdict == Verdict::holds_on_window);
  }
}

TEST(Implications, RandomLogConvexCustomSequences) {
  // Random nonnegative second differences give log-convex alpha; B2-tilde must follow.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> logs(120, 0.0);
    double slope = u(rng);
    for (int n = 1; n < 120; ++n) {
      logs[n] = logs[n - 1] + slope;
      slope += u(rng);
    }
    const auto ws = make_custom(logs);
    const Window w{0, 119};
    EXPECT_EQ(check_B3(ws, w).verdict, Verdict::holds_on_window);
    EXPECT_EQ(check_B2_tilde(ws, w).verdict, Verdict::holds_on_window);
  }
}

TEST(Dispatch, NamesRoundTrip) {
  for (auto c : {Condition::A1, Condition::A2, Condition::A2t, Condition::B1, Condition::B1t, Condition::B2,
                 Condition::B2t, Condition::B3}) {
    EXPECT_EQ(condition_from_string(to_string(c)), c);
    EXPECT_EQ(check_condition(make_constant(), c).condition, c);
  }
  EXPECT_THROW(condition_from_string("C9"), ValidationError);
}
