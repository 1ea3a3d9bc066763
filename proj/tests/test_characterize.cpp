#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cks/characterize.hpp"
#include "cks/errors.hpp"
#include "oracles.hpp"

using namespace cks;

namespace {

const SpaceModel kModel = SpaceModel::default_model();

CPoint point(std::initializer_list<Complex> xs) { return CPoint{std::vector<Complex>(xs)}; }

ChaosExpansion constant_one() {
  ChaosExpansion phi(kModel, 0);
  phi.set({}, 1.0);
  return phi;
}

GridSpec small_grid() {
  GridSpec g;
  g.directions = 4;
  g.phases = 8;
  g.radii = 4;
  return g;
}

}  // namespace

TEST(Constants, LadderSteps) {
  EXPECT_EQ(ladder_steps(1.0, 0.5), 0);
  EXPECT_EQ(ladder_steps(0.3, 0.5), 0);
  EXPECT_EQ(ladder_steps(4.0, 0.5), 1);
  EXPECT_EQ(ladder_steps(5.0, 0.5), 2);
  EXPECT_THROW(ladder_steps(0.0, 0.5), ValidationError);
}

TEST(Constants, RigorousTestK) {
  const auto ws = make_constant();
  const auto one = rigorous_K_test(constant_one(), 0.3, 2, ws);
  EXPECT_DOUBLE_EQ(one.spec.K, 1.0);
  EXPECT_EQ(one.spec.mode, BoundMode::test);

  ChaosExpansion phi(kModel, 2);
  phi.set({0, 1}, Complex{1.0, -2.0});
  const auto a1 = rigorous_K_test(phi, 1.0, 1, ws);
  EXPECT_EQ(a1.q, 1);
  EXPECT_DOUBLE_EQ(a1.spec.K, phi_norm(phi, 1, ws));
  EXPECT_EQ(rigorous_K_test(phi, 0.25, 0, ws).q, 1);
  EXPECT_EQ(rigorous_K_test(phi, 0.2, 0, ws).q, 2);
  EXPECT_EQ(rigorous_K_test(phi, 3.0, 0, ws).q, 0);
  EXPECT_EQ(rigorous_K_generalized(phi, 0.25, 2, ws).q, 1);
}

TEST(Constants, Normalize) {
  const GrowthBoundSpec g{1.5, 0.5, 2, BoundMode::generalized};
  EXPECT_EQ(normalize_constants(g, kModel).q, 2);
  EXPECT_EQ(normalize_constants({1.5, 4.0, 2, BoundMode::generalized}, kModel).q, 3);
  EXPECT_EQ(normalize_constants({1.5, 5.0, 2, BoundMode::generalized}, kModel).q, 4);
  EXPECT_EQ(normalize_constants({1.5, 4.0, 2, BoundMode::test}, kModel).q, 1);
  EXPECT_EQ(normalize_constants({1.5, 4.0, 2, BoundMode::test}, kModel).spec.a, 1.0);
}

TEST(Growth, ConstantFunctionPasses) {
  const auto rep = verify_growth(constant_one(), {1.0, 1.0, 0, BoundMode::test}, make_constant(), small_grid());
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.max_ratio, 1.0, 1e-15);  // attained at the origin
}

TEST(Growth, CauchySchwarzGeneralizedInstance) {
  const auto ws = make_bell(2);
  const auto Phi = exp_vector(kModel, point({0.4, Complex{0.0, 0.3}, -0.2}), 6);
  const GrowthBoundSpec spec{phi_norm(Phi, 1, ws, true), 1.0, 1, BoundMode::generalized};
  const auto rep = verify_growth(Phi, spec, ws, small_grid());
  EXPECT_TRUE(rep.pass) << rep.max_ratio;
  // The exponential vector nearly attains Cauchy-Schwarz, so refinement gets close to 1.
  EXPECT_GT(rep.max_ratio, 0.9);
}

TEST(Growth, HalvedKFailsWithWitness) {
  const auto ws = make_constant();
  const auto phi = exp_vector(kModel, point({0.5, 0.2, Complex{0.1, 0.1}}), 5);
  const auto bound = rigorous_K_test(phi, 1.0, 0, ws);
  const auto ok = verify_growth(phi, bound.spec, ws, small_grid());
  EXPECT_TRUE(ok.pass);
  GrowthBoundSpec halved = bound.spec;
  halved.K *= 0.5;
  const auto bad = verify_growth(phi, halved, ws, small_grid());
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.max_ratio, 2.0 * ok.max_ratio, 1e-6 * bad.max_ratio);
  // The witness reproduces the violation on its own.
  const GenFunEval gf(ws, EgfMode::one_over_alpha);
  EXPECT_GT(std::log(std::abs(s_transform(phi, bad.witness))), log_growth_rhs(halved, gf, kModel, bad.witness));
}

TEST(Growth, RigorousBoundsHoldOnRandomInstances) {
  std::mt19937_64 rng(1234);
  for (const auto& ws : {make_constant(), make_factorial_power(0.5)}) {
    for (int trial = 0; trial < 6; ++trial) {
      const auto phi = random_sparse_expansion(kModel, 3, 5, rng);
      for (double a : {0.25, 1.0, 4.0}) {
        const auto test = rigorous_K_test(phi, a, 1, ws);
        const auto rep = verify_growth(phi, test.spec, ws, small_grid());
        EXPECT_TRUE(rep.pass) << rep.max_ratio;
        const auto normalized = normalize_constants(test.spec, kModel);
        EXPECT_TRUE(verify_growth(phi, normalized.spec, ws, small_grid()).pass);

        const auto gen = rigorous_K_generalized(phi, a, 2, ws);
        EXPECT_TRUE(verify_growth(phi, gen.spec, ws, small_grid()).pass);
        EXPECT_TRUE(verify_growth(phi, normalize_constants(gen.spec, kModel).spec, ws, small_grid()).pass);
      }
    }
  }
}

// phi = xi_0^3 gives |S phi| = |xi_0|^3 and ||phi||_0^2 = 3!, so the sup of
// |xi|^3 e^{-|xi|^2/2} / sqrt(6) sits at |xi|^2 = 3: below 1/2, and halving K cannot fail.
TEST(Growth, CauchySchwarzSlackOnMonomial) {
  ChaosExpansion phi(kModel, 3);
  phi.set({0, 0, 0}, 1.0);
  const auto ws = make_constant();
  const auto bound = rigorous_K_test(phi, 1.0, 0, ws);
  EXPECT_NEAR(bound.spec.K, std::sqrt(6.0), 1e-12);
  const double sup = std::sqrt(27.0) * std::exp(-1.5) / std::sqrt(6.0);
  const auto rep = verify_growth(phi, bound.spec, ws);
  EXPECT_NEAR(rep.max_ratio, sup, 1e-6);
  GrowthBoundSpec halved = bound.spec;
  halved.K *= 0.5;
  EXPECT_TRUE(verify_growth(phi, halved, ws).pass);
}

TEST(Growth, ZeroKOnlyPassesForZeroFunction) {
  const ChaosExpansion zero(kModel, 2);
  EXPECT_TRUE(verify_growth(zero, {0.0, 1.0, 0, BoundMode::test}, make_constant(), small_grid()).pass);
  EXPECT_FALSE(verify_growth(constant_one(), {0.0, 1.0, 0, BoundMode::test}, make_constant(), small_grid()).pass);
}

TEST(Extraction, DiagonalExamples) {
  ChaosExpansion sq(kModel, 2);
  sq.set({0, 0}, 1.0);
  const CPoint e0 = point({1.0, 0.0, 0.0});
  const auto c = extract_diag_coefficients(sq, e0, 1.0, 8);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_LE(std::abs(c[0]), 1e-15);
  EXPECT_LE(std::abs(c[1]), 1e-15);
  EXPECT_LE(std::abs(c[2] - 1.0), 1e-15);
  const auto c2 = extract_diag_coefficients(sq, e0, 2.0, 8);
  for (int n = 0; n <= 2; ++n) EXPECT_LE(std::abs(c[n] - c2[n]), 1e-14);

  const auto constant = extract_diag_coefficients([](Complex) { return Complex{3.0, 1.0}; }, 3, 1.0, 5);
  EXPECT_LE(std::abs(constant[0] - Complex{3.0, 1.0}), 1e-15);
  for (int n = 1; n <= 3; ++n) EXPECT_LE(std::abs(constant[n]), 1e-15);
}

TEST(Extraction, DegreeOverflowDetected) {
  EXPECT_THROW(extract_diag_coefficients([](Complex z) { return std::exp(z); }, 3, 1.0, 8), DegreeOverflow);
  EXPECT_THROW(extract_diag_coefficients([](Complex z) { return z; }, 3, 1.0, 3), ValidationError);
}

TEST(Extraction, RoundTripAndRadiusInvariance) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    const SpaceModel m = SpaceModel::default_model(d);
    const auto phi = random_sparse_expansion(m, 4, 6, rng);
    for (int k = 0; k < 20; ++k) {
      const CPoint xi = random_point(d, rng);
      const auto c1 = extract_diag_coefficients(phi, xi, 1.0, 6);
      const auto c05 = extract_diag_coefficients(phi, xi, 0.5, 6);
      const auto c2 = extract_diag_coefficients(phi, xi, 2.0, 6);
      for (int n = 0; n <= phi.max_degree(); ++n) {
        const Complex exact = apply_diagonal(phi.tensor(n), xi);
        EXPECT_LE(std::abs(c1[n] - exact), 1e-9);
        EXPECT_LE(std::abs(c05[n] - c1[n]), 1e-9);
        EXPECT_LE(std::abs(c2[n] - c1[n]), 1e-9);
      }
    }
  }
}

TEST(Extraction, PolarizedExamples) {
  ChaosExpansion cross(kModel, 2);
  cross.set({0, 1}, 1.0);
  const CPoint e0 = point({1.0, 0.0, 0.0});
  const CPoint e1 = point({0.0, 1.0, 0.0});
  const std::vector<CPoint> dirs{e0, e1};
  const Complex got = polarized_coefficient(cross, dirs, 4);
  EXPECT_LE(std::abs(got - apply_polarized(cross.tensor(2), dirs)), 1e-14);
  // mult(0,1) = 2 ordered tuples, symmetrized product with weight 1/2 each: total 1.
  EXPECT_LE(std::abs(got - 1.0), 1e-14);

  ChaosExpansion first(kModel, 1);
  first.set({2}, 5.0);
  EXPECT_LE(std::abs(polarized_coefficient(first, dirs, 4)), 1e-14);
}

TEST(Extraction, PolarizedMatchesTensorsAndDiagonal) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    const SpaceModel m = SpaceModel::default_model(d);
    const auto phi = random_sparse_expansion(m, 4, 6, rng);
    for (int n = 1; n <= phi.max_degree(); ++n) {
      std::vector<CPoint> xs;
      for (int i = 0; i < n; ++i) xs.push_back(random_point(d, rng));
      EXPECT_LE(std::abs(polarized_coefficient(phi, xs, phi.max_degree() + 2) - apply_polarized(phi.tensor(n), xs)), 1e-9);
      const std::vector<CPoint> same(static_cast<std::size_t>(n), xs.front());
      const auto diag = extract_diag_coefficients(phi, xs.front(), 1.0, phi.max_degree() + 2);
      EXPECT_LE(std::abs(polarized_coefficient(phi, same, phi.max_degree() + 2) - diag[n]), 1e-9);
    }
  }
  std::vector<CPoint> five(5, point({1.0}));
  EXPECT_THROW(polarized_coefficient([](const CPoint&) { return Complex{}; }, five, 6, 7), ValidationError);
}

TEST(Reconstruction, CoefficientBoundValues) {
  const auto ws = make_constant();
  const GrowthBoundSpec spec{2.0, 0.5, 1, BoundMode::test};
  const CPoint xi = point({1.0, 0.0, 0.0});
  const std::vector<CPoint> one{xi};
  const double want = std::log(4.0 * 0.5 * std::exp(3.0) / (2.0 * std::numbers::pi) * 0.25);
  EXPECT_NEAR(lemma1_log_coefficient_bound(spec, ws, kModel, 1, one), want, 1e-10);
  EXPECT_NEAR(std::exp(3.0) / (2.0 * std::numbers::pi), 3.19672, 1e-5);
  EXPECT_NEAR(lemma1_log_coefficient_bound(spec, ws, kModel, 0, {}), std::log(4.0), 1e-15);
  EXPECT_THROW(lemma1_log_coefficient_bound({2.0, 0.5, 1, BoundMode::generalized}, ws, kModel, 1, one),
               ValidationError);
}

TEST(Reconstruction, FirstChaosEndToEnd) {
  ChaosExpansion e0(kModel, 1);
  e0.set({0}, 1.0);
  const auto rep = run_lemma1_check(e0, make_constant(), 0.1, 1, 0, 5, 17, 1.0);
  EXPECT_TRUE(rep.coefficient_bounds_hold);
  EXPECT_TRUE(rep.norm_bound_holds);
  EXPECT_GE(rep.worst_coefficient_log_slack, 0.0);
}

TEST(Reconstruction, AdmissibilityArithmetic) {
  const double hs = hs_norm(kModel, 1, 0);
  EXPECT_NEAR(hs * hs, 0.340278, 1e-6);
  const double threshold = 1.0 / (std::exp(2.0) * hs * hs);
  EXPECT_NEAR(threshold, 0.39771, 2e-5);
  EXPECT_TRUE(lemma1_admissibility(threshold * 0.999, hs, 1.0).admissible);
  EXPECT_FALSE(lemma1_admissibility(threshold * 1.001, hs, 1.0).admissible);
}

TEST(Reconstruction, NormBoundSeries) {
  const auto ws = make_constant();
  const auto zero_a = lemma1_norm_bound({3.0, 0.0, 1, BoundMode::test}, ws, kModel, 0, 1.0);
  EXPECT_NEAR(zero_a.log_rhs, std::log(9.0), 1e-15);
  const auto b = lemma1_norm_bound({3.0, 0.1, 1, BoundMode::test}, ws, kModel, 0);
  EXPECT_TRUE(std::isfinite(b.log_rhs));
  EXPECT_GT(b.log_rhs, std::log(9.0));
  EXPECT_LE(b.rel_tail, 1e-15);
  EXPECT_TRUE(b.admissibility.window_limited);
  // Independent partial sum with closed-form Theta(n) = n! e^n / n^n.
  const double x = 0.1 * std::exp(2.0) * std::pow(hs_norm(kModel, 1, 0), 2);
  long double s = 0.0L;
  for (int n = 1; n <= 200; ++n) {
    s += std::exp(static_cast<long double>(oracle::log_factorial(n) + n - n * std::log(n) + n * std::log(x)));
  }
  const double want = std::log(9.0 + 9.0 / (2.0 * std::numbers::pi) * static_cast<double>(s));
  EXPECT_NEAR(b.log_rhs, want, 1e-10);
  EXPECT_THROW(lemma1_norm_bound({3.0, 0.5, 1, BoundMode::test}, ws, kModel, 0), NotAdmissible);
  EXPECT_THROW(lemma1_norm_bound({3.0, 0.1, 1, BoundMode::test}, ws, kModel, 2), ValidationError);
}

TEST(Reconstruction, RandomInstancesRespectNormBound) {
  std::mt19937_64 rng(2024);
  for (const auto& ws : {make_constant(), make_factorial_power(0.5), make_bell(2)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto phi = random_sparse_expansion(SpaceModel::default_model(1 + trial % 3), 4, 6, rng);
      const auto rep = run_lemma1_check(phi, ws, 0.05, 2, 1, 4, 100 + trial);
      EXPECT_TRUE(rep.coefficient_bounds_hold);
      EXPECT_TRUE(rep.norm_bound_holds) << rep.log_norm_sq << " vs " << rep.norm_bound.log_rhs;
      EXPECT_LE(rep.max_diag_error, 1e-9);
      EXPECT_LE(rep.max_polarized_error, 1e-9);
    }
  }
}

TEST(Envelopes, HalfAtOne) {
  const auto e = ks_envelopes(0.5, 1.0);
  EXPECT_NEAR(std::exp(e.log_lower_e), 1.6487, 1e-4);
  // Quoted values are rounded to about four figures.
  EXPECT_NEAR(std::exp(e.log_g_alpha), 3.4694, 2e-4);
  EXPECT_NEAR(std::exp(e.log_upper_e), 3.8442, 1e-4);
  EXPECT_NEAR(std::exp(e.log_lower_f), 2.3257, 2e-4);
  EXPECT_NEAR(std::exp(e.log_g_inverse), 2.4316, 1e-3);
  // Direct-summation and closed-form oracles at full precision.
  EXPECT_NEAR(std::exp(e.log_g_inverse), 2.430915354722855, 1e-12);
  EXPECT_NEAR(std::exp(e.log_lower_f), std::pow(2.0, -0.5) * std::exp(1.5 * std::pow(2.0, -1.0 / 3.0)), 1e-12);
  EXPECT_NEAR(std::exp(e.log_upper_f), 4.4817, 1e-4);
  EXPECT_TRUE(e.sandwich_e);
  EXPECT_TRUE(e.sandwich_f);
}

TEST(Envelopes, SmallArgumentTendsToOne) {
  const auto e = ks_envelopes(0.3, 1e-8);
  for (double l : {e.log_lower_e, e.log_g_alpha, e.log_upper_e, e.log_lower_f, e.log_g_inverse, e.log_upper_f}) {
    EXPECT_NEAR(l, 0.0, 0.31);  // the 2^{+-beta} prefactors survive at r -> 0
  }
  EXPECT_NEAR(e.log_g_alpha, 0.0, 1e-7);
  EXPECT_NEAR(e.log_g_inverse, 0.0, 1e-7);
  EXPECT_THROW(ks_envelopes(0.0, 1.0), ValidationError);
  EXPECT_THROW(ks_envelopes(0.5, 0.0), ValidationError);
}

TEST(Envelopes, SandwichOnGrid) {
  for (int b = 1; b <= 9; ++b) {
    for (int i = 0; i < 12; ++i) {
      const double r = std::pow(10.0, -2.0 + 4.0 * i / 11.0);
      const auto e = ks_envelopes(0.1 * b, r);
      EXPECT_TRUE(e.sandwich_e && e.sandwich_f) << "beta=" << 0.1 * b << " r=" << r;
      EXPECT_LE(e.rel_tail, 1e-12);
    }
  }
}

TEST(IteratedLog, Definition) {
  EXPECT_DOUBLE_EQ(iterated_log(1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(iterated_log(1, std::exp(2.0)), 2.0);
  EXPECT_NEAR(iterated_log(2, std::exp(std::exp(1.0))), 1.0, 1e-15);
  EXPECT_GE(iterated_log(3, -5.0), 1.0);
  EXPECT_THROW(iterated_log(0, 2.0), ValidationError);
}

TEST(BellEnvelope, Rows) {
  const std::vector<double> grid{0.0, 100.0};
  const auto rows = bell_envelope_scan(2, grid);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].lhs, 0.0);
  EXPECT_EQ(rows[0].ratio, 1.0);
  EXPECT_GT(rows[1].lhs, 0.0);
  EXPECT_GT(rows[1].rhs, 0.0);
  EXPECT_TRUE(std::isfinite(rows[1].ratio));
  EXPECT_NEAR(rows[1].rhs, std::sqrt(100.0 * std::log(100.0)), 1e-12);
}

TEST(Random, Reproducible) {
  std::mt19937_64 a(5), b(5);
  const auto pa = random_sparse_expansion(kModel, 3, 4, a);
  const auto pb = random_sparse_expansion(kModel, 3, 4, b);
  for (int n = 0; n <= 3; ++n) EXPECT_EQ(pa.tensor(n).entries(), pb.tensor(n).entries());
}
