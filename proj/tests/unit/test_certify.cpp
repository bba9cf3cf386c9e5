#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "ninput/certify.hpp"
#include "ninput/errors.hpp"

namespace {

using namespace ninput;
using ninput::testing::dirac;
using ninput::testing::e;

double witness_energy(const KernelSpec& k, const PDWitness& w) {
  std::vector<DiscreteMeasure> ms;
  for (const auto& p : w.pins) ms.push_back(dirac(p));
  ms.push_back(w.measure);
  ms.push_back(w.measure);
  return mutual_energy(k, ms).value;
}

TEST(PDPoints, InnerGramIsPositive) {
  const PDVerdict v = pd_test_points(make_kernel("inner"), sample_sphere(3, 30, 1), false);
  EXPECT_TRUE(v.passed());
  EXPECT_GE(v.min_eigenvalue_seen, -1e-10);
  EXPECT_EQ(v.trials_run, 1);
}

TEST(PDPoints, NegativeDistanceFailsOnTwoPoints) {
  const auto g = make_kernel("riesz", {{"s", "1"}, {"scale", "-1"}});
  const PDVerdict v = pd_test_points(g, PointConfiguration({e(3, 1), e(3, 2)}), false);
  ASSERT_FALSE(v.passed());
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_LT(v.witness->energy, 0.0);
  EXPECT_NEAR(v.witness->energy, witness_energy(g, *v.witness), 1e-12);
  // Witness delta_e1 + delta_e2 (up to normalization): (0, -sqrt2; -sqrt2, 0).
  const auto hand = mutual_energy(g, {combine(dirac(e(3, 1)), dirac(e(3, 2)), 1, 1),
                                      combine(dirac(e(3, 1)), dirac(e(3, 2)), 1, 1)});
  EXPECT_NEAR(hand.value, -2.0 * std::sqrt(2.0), 1e-14);
}

TEST(PDPoints, NegativeDistanceIsConditionallyPositive) {
  const auto g = make_kernel("riesz", {{"s", "1"}, {"scale", "-1"}});
  EXPECT_TRUE(pd_test_points(g, sample_sphere(3, 40, 2), true).passed());
}

TEST(PDPoints, PinnedNegVol2FailsWithEnergyMinusTwo) {
  const auto g = pin(make_kernel("neg_vol2"), {e(3, 1)});
  const PDVerdict v = pd_test_points(g, PointConfiguration({e(3, 2), e(3, 3)}), false);
  ASSERT_FALSE(v.passed());
  // Normalized witness is delta_e2 + delta_e3.
  EXPECT_NEAR(v.witness->energy, -2.0, 1e-12);
  EXPECT_NEAR(v.witness->measure.total_mass(), 2.0, 1e-12);
}

TEST(PDPoints, ConditionalNeedsTwoPoints) {
  const PDVerdict v = pd_test_points(make_kernel("inner"), PointConfiguration({e(3, 1)}), true);
  EXPECT_TRUE(v.passed());
}

TEST(PD2Input, Options) {
  PDTestOptions opt;
  opt.trials = 5;
  opt.seed = 3;
  const PDVerdict v = pd_test_2input(make_kernel("frame2"), 4, opt);
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.trials_run, 5);
  EXPECT_EQ(v.mode, PDMode::pd);
  EXPECT_THROW(pd_test_2input(make_kernel("uvt"), 3, opt), InvalidArgument);
  opt.set_size = 0;
  EXPECT_THROW(pd_test_2input(make_kernel("inner"), 3, opt), InvalidArgument);
}

TEST(NPD, PositiveDefiniteKernelsPass) {
  NPDTestOptions opt;
  opt.pin_trials = 3;
  opt.inner_trials = 5;
  opt.seed = 11;
  EXPECT_TRUE(npd_test(make_kernel("uvt"), 3, opt).passed());
  EXPECT_TRUE(npd_test(make_kernel("quad_a", {{"a", "0.5"}, {"shift", "true"}}), 3, opt).passed());
  const PDVerdict v = npd_test(make_kernel("uvt"), 3, opt);
  EXPECT_EQ(v.trials_run, 15);
}

TEST(NPD, NegArea2FailsConditionallyWithBalancedWitness) {
  NPDTestOptions opt;
  opt.conditional = true;
  const auto k = make_kernel("neg_area2");
  const PDVerdict v = npd_test(k, 3, opt);
  ASSERT_FALSE(v.passed());
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.mode, PDMode::conditional);
  EXPECT_NEAR(v.witness->measure.total_mass(), 0.0, 1e-12);
  EXPECT_EQ(v.witness->pins.size(), 1u);
  EXPECT_LT(v.witness->energy, 0.0);
  EXPECT_NEAR(witness_energy(k, *v.witness), v.witness->energy, 1e-12);
}

TEST(NPD, S011FailsConditionally) {
  NPDTestOptions opt;
  opt.conditional = true;
  const auto k = make_kernel("s011");
  const PDVerdict v = npd_test(k, 3, opt);
  ASSERT_FALSE(v.passed());
  EXPECT_NEAR(v.witness->measure.total_mass(), 0.0, 1e-12);
}

TEST(NPD, RejectsTwoInputKernels) {
  EXPECT_THROW(npd_test(make_kernel("inner"), 3, {}), InvalidArgument);
}

TEST(Witness, NormalizationAndBalance) {
  const PointConfiguration pts({e(3, 1), e(3, 2), e(3, 3)});
  Vector c(3);
  c << -0.5, 0.2, 1e-14;
  const DiscreteMeasure w = witness_measure(pts, c, false);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w.weight(0), 1.0);   // sign flipped so the largest is positive
  EXPECT_DOUBLE_EQ(w.weight(1), -0.4);
  const DiscreteMeasure b = witness_measure(pts, c, true);
  EXPECT_NEAR(b.total_mass(), 0.0, 1e-15);
}

TEST(Convexity, SelfMixIsFlat) {
  const auto k = make_kernel("area2");
  const auto mu = random_probability_measure(3, 4, 1);
  const ConvexityReport r = convexity_probe(k, mu, mu);
  EXPECT_NEAR(r.g_prime_0, 0.0, 1e-12);
  EXPECT_NEAR(r.g_double_prime_0, 0.0, 1e-12);
  EXPECT_TRUE(r.convex_on_unit_interval);
  EXPECT_FALSE(r.violation_t.has_value());
}

TEST(Convexity, S100ChordFailsAgainstPointMass) {
  // Closed-form sigma surrogate: the six signed basis vectors are a
  // 3-design, so their mixed energies with delta_e1 equal those of sigma.
  std::vector<UnitVector> atoms;
  for (int i = 1; i <= 3; ++i) {
    atoms.push_back(e(3, i));
    atoms.push_back(e(3, i, -1));
  }
  const DiscreteMeasure sigma6(atoms, std::vector<double>(6, 1.0 / 6));
  const ConvexityReport r = convexity_probe(make_kernel("s100"), sigma6, dirac(e(3, 1)));
  EXPECT_FALSE(r.convex_on_unit_interval);
  ASSERT_TRUE(r.violation_t.has_value());
  EXPECT_NEAR(r.g(0.5) - 0.5 * (r.g(0.0) + r.g(1.0)), 3.0 / 8.0 * 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.g_prime_0, 0.0, 1e-12);
}

TEST(Convexity, HDerivativesMatchG) {
  // For a mixture at mu, g''(0) and h''(0) satisfy g'' = n(n-1)/2 * h''.
  const auto k = make_kernel("uvt");
  const auto mu = random_probability_measure(3, 3, 2);
  const auto nu = random_probability_measure(3, 2, 3);
  const ConvexityReport r = convexity_probe(k, mu, nu);
  EXPECT_NEAR(r.g_double_prime_0, 3.0 * r.h_double_prime_0, 1e-10);
}

TEST(Constancy, UvtOnSixPointDesignIsConstant) {
  std::vector<UnitVector> atoms;
  for (int i = 1; i <= 3; ++i) {
    atoms.push_back(e(3, i));
    atoms.push_back(e(3, i, -1));
  }
  const DiscreteMeasure mu(atoms, std::vector<double>(6, 1.0 / 6));
  const ConstancyResult r = potential_constancy_check(make_kernel("uvt"), mu, sample_sphere(3, 20, 4), 1e-12);
  EXPECT_TRUE(r.exact);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.mean, 1.0 / 9.0, 1e-14);
}

TEST(Constancy, NonInvariantMeasureFails) {
  const ConstancyResult r =
      potential_constancy_check(make_kernel("uvt"), dirac(e(3, 1)), sample_sphere(3, 20, 5), 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_deviation, 1e-3);
}

TEST(Constancy, ResampledPathReportsStderr) {
  ConstancyOptions opt;
  opt.exact_budget = 10;
  opt.samples = 2000;
  opt.seed = 6;
  opt.stderr_multiple = 5.0;
  const DiscreteMeasure mu = DiscreteMeasure::empirical(sample_sphere(3, 5000, 7));
  const ConstancyResult r = potential_constancy_check(make_kernel("uvt"), mu, sample_sphere(3, 10, 8), 0.0, opt);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.std_error, 0.0);
  EXPECT_GE(r.tol_used, 5.0 * r.std_error);
}

TEST(Inequalities, UvtHoldsEverything) {
  const InequalityReport r = inequality_suite(make_kernel("uvt"), 3, 100, 1);
  for (const auto& e : r.entries) {
    EXPECT_LE(e.worst_residual, 1e-10) << e.name;
    EXPECT_FALSE(e.expected_violation);
  }
  EXPECT_TRUE(r.at("gm").asserted);
  EXPECT_THROW(r.at("nope"), InvalidArgument);
}

TEST(Inequalities, QuadAOneAmHolds) {
  const InequalityReport r = inequality_suite(make_kernel("quad_a", {{"a", "1"}}), 3, 100, 2);
  EXPECT_LE(r.at("am").worst_residual, 1e-10);
  EXPECT_TRUE(r.at("am").asserted);
  EXPECT_FALSE(r.at("gm").asserted);
}

TEST(Inequalities, S100AmViolationIsExpected) {
  const InequalityReport r = inequality_suite(make_kernel("s100"), 3, 200, 3);
  EXPECT_TRUE(r.at("am").expected_violation);
  EXPECT_GT(r.at("am").worst_residual, 1e-6);
}

TEST(RandomMeasure, IsProbability) {
  const auto mu = random_probability_measure(4, 5, 9);
  EXPECT_TRUE(mu.is_probability());
  EXPECT_EQ(mu.size(), 5u);
  EXPECT_THROW(random_probability_measure(4, 0, 9), InvalidArgument);
}

}  // namespace
