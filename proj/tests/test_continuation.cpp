#include <gtest/gtest.h>

#include <cmath>

#include "plap/continuation.hpp"
#include "plap/fixtures.hpp"

using namespace plap;

namespace {

ContinuationControls small_window(double cap) {
  ContinuationControls c;
  c.lambda_lo = -10.0;
  c.lambda_hi = 10.0;
  c.norm_cap = cap;
  return c;
}

Branch synthetic_branch() {
  Branch br;
  for (double s : {0.1, 0.2, 0.3, 0.4, 0.6, 0.8}) {
    BranchPoint pt;
    pt.sup_norm = s;
    pt.lambda = 1.0 + s * s;
    br.points.push_back(pt);
  }
  return br;
}

}  // namespace

TEST(Nonlinearity, FamilyLimits) {
  const PExponent p(2.0);
  EXPECT_DOUBLE_EQ(NonlinearitySpec::phi(p, 3.0).f0(), 3.0);
  const auto r = NonlinearitySpec::rational(p, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(r.f0(), 1.0);
  EXPECT_DOUBLE_EQ(r.finf(), 2.0);
  EXPECT_NEAR(r(1e4) / 1e4, 2.0, 1e-7);
  const auto sq = NonlinearitySpec::power(p, 0.5);
  EXPECT_TRUE(std::isinf(sq.f0()));
  EXPECT_EQ(sq.finf(), 0.0);
  const auto a7 = NonlinearitySpec::a7(p, {-2.0, -1.0, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(a7.f0(), 4.0);
  EXPECT_DOUBLE_EQ(a7.finf(), 1.0);
  EXPECT_EQ(a7(1.0), 0.0);
  EXPECT_LT(a7(1.5), 0.0);
  EXPECT_GT(a7(3.0), 0.0);
  for (const auto& f : {r, sq, a7, NonlinearitySpec::superlinear(p)}) EXPECT_NO_THROW(f.validate());
}

TEST(Nonlinearity, DerivativesMatchDifferenceQuotients) {
  const PExponent p(3.0);
  for (const auto& f : {NonlinearitySpec::rational(p, 1.0, 2.0), NonlinearitySpec::a7(p, {-2.0, -1.0, 1.0, 2.0}),
                        NonlinearitySpec::superlinear(p)}) {
    for (double s : {-2.7, -0.4, 0.3, 1.6}) {
      const double h = 1e-6;
      EXPECT_NEAR(f.derivative(s), (f(s + h) - f(s - h)) / (2.0 * h), 1e-5 * (1.0 + std::fabs(f.derivative(s))));
    }
  }
}

TEST(Nonlinearity, FromFamilyRejectsUnknownNamesAndMissingParameters) {
  const PExponent p(2.0);
  EXPECT_THROW(NonlinearitySpec::from_family(p, "cubic", {}), ConfigError);
  EXPECT_THROW(NonlinearitySpec::from_family(p, "rational", {{"a", 1.0}}), ConfigError);
  EXPECT_THROW(NonlinearitySpec::a7(p, {-1.0, -2.0, 1.0, 2.0}), ConfigError);
  EXPECT_EQ(NonlinearitySpec::from_family(p, "phi_p", {}).f0(), 1.0);
}

TEST(Nonlinearity, CutoffKeepsTheFunctionInsideAndCapsTheLimit) {
  const PExponent p(2.0);
  const auto f = NonlinearitySpec::superlinear(p);
  const auto fn = f.with_cutoff(Cutoff::f_lower_n, 10.0);
  EXPECT_DOUBLE_EQ(fn(3.0), f(3.0));
  EXPECT_DOUBLE_EQ(fn(-7.0), f(-7.0));
  EXPECT_DOUBLE_EQ(fn(50.0), 10.0 * 50.0);
  EXPECT_DOUBLE_EQ(fn.finf(), 10.0);
  EXPECT_NO_THROW(fn.validate());
  const auto gn = NonlinearitySpec::power(p, 0.5).with_cutoff(Cutoff::g_upper_n, 10.0);
  EXPECT_DOUBLE_EQ(gn.f0(), 10.0);
  EXPECT_DOUBLE_EQ(gn(0.05), 10.0 * 0.05);
  EXPECT_DOUBLE_EQ(gn(4.0), 2.0);
  EXPECT_THROW(fn.with_cutoff(Cutoff::f_upper_n, 3.0), ConfigError);
  EXPECT_EQ(parse_cutoff("f_n"), Cutoff::f_lower_n);
}

TEST(Continuation, PhiBranchIsVertical) {
  const ProblemSpec spec = fixtures::cosine(2.0, 128);
  const double l0 = principal_eigen(spec, Sign::plus).lambda;
  const Branch br = continue_from_zero(spec, NonlinearitySpec::phi(spec.p()), Sign::plus, Sign::plus, small_window(5.0));
  ASSERT_GE(br.points.size(), 3u);
  for (const auto& pt : br.points) EXPECT_NEAR(pt.lambda, l0, 1e-6);
  EXPECT_EQ(br.termination, Termination::NormCapReached);
}

TEST(Continuation, RationalBranchBifurcatesFromPrincipalEigenvalue) {
  const ProblemSpec spec = fixtures::cosine(2.0, 128);
  const double l0 = principal_eigen(spec, Sign::plus).lambda;
  const Branch br = continue_from_zero(spec, fixtures::rational(spec), Sign::plus, Sign::plus, small_window(10.0));
  ASSERT_GE(br.points.size(), 5u);
  EXPECT_NEAR(extrapolate_to_zero(br), l0, 1e-3 * l0);
  for (const auto& pt : br.points) {
    EXPECT_TRUE(one_signed_with(pt.u, Sign::plus));
    EXPECT_TRUE(no_double_zero(pt.u));
    EXPECT_LE(pt.residual, 1e-8);
    EXPECT_LT(pt.lambda, l0 + 1e-9);
    EXPECT_GT(pt.lambda, 0.5 * l0 - 1e-9);
  }
  for (std::size_t i = 1; i < br.points.size(); ++i) EXPECT_GT(br.points[i].arclength, br.points[i - 1].arclength);
}

TEST(Continuation, OddNonlinearityMirrorsTheBranch) {
  const ProblemSpec spec = fixtures::cosine(2.0, 128);
  const auto f = fixtures::rational(spec);
  const Branch plus = continue_from_zero(spec, f, Sign::plus, Sign::plus, small_window(5.0));
  const Branch minus = continue_from_zero(spec, f, Sign::plus, Sign::minus, small_window(5.0));
  for (double s : {1.0, 2.0, 4.0}) {
    const auto a = lambda_at_sup(plus, s), b = lambda_at_sup(minus, s);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(*a, *b, 1e-6);
  }
  for (const auto& pt : minus.points) EXPECT_TRUE(one_signed_with(pt.u, Sign::minus));
}

TEST(Continuation, NegativeWeightBranchHasNegativeLambda) {
  const ProblemSpec spec = fixtures::cosine(2.0, 128);
  const double l0 = principal_eigen(spec, Sign::minus).lambda;
  const Branch br = continue_from_zero(spec, fixtures::rational(spec), Sign::minus, Sign::plus, small_window(5.0));
  ASSERT_FALSE(br.points.empty());
  EXPECT_NEAR(extrapolate_to_zero(br), l0, 1e-3 * std::fabs(l0));
  for (const auto& pt : br.points) EXPECT_LT(pt.lambda, 0.0);
}

TEST(Continuation, SeedsNeedFiniteLimits) {
  const ProblemSpec spec = fixtures::cosine(2.0, 64);
  EXPECT_THROW(continue_from_zero(spec, NonlinearitySpec::power(spec.p(), 2.0), Sign::plus, Sign::plus), ConfigError);
  EXPECT_THROW(continue_from_zero(spec, fixtures::square_root(spec), Sign::plus, Sign::plus), ConfigError);
  EXPECT_THROW(seed_from_infinity(spec, fixtures::superlinear(spec), Sign::plus, Sign::plus), ConfigError);
  EXPECT_THROW(seed_from_infinity(spec, fixtures::square_root(spec), Sign::plus, Sign::plus), ConfigError);
}

TEST(Continuation, ExtrapolationAndInterpolationOnSyntheticBranch) {
  const Branch br = synthetic_branch();
  EXPECT_NEAR(extrapolate_to_zero(br), 1.0, 1e-12);
  const auto l = lambda_at_sup(br, 0.5);
  ASSERT_TRUE(l.has_value());
  EXPECT_NEAR(*l, 1.25, 1e-12);
  EXPECT_FALSE(lambda_at_sup(br, 2.0).has_value());
  EXPECT_THROW(extrapolate_to_zero(Branch{}), NumericalError);
}

TEST(Continuation, PointwiseChecks) {
  EXPECT_TRUE(one_signed_with(DiscreteField(4, 1.0), Sign::plus));
  EXPECT_FALSE(one_signed_with(DiscreteField(4, 1.0), Sign::minus));
  EXPECT_FALSE(one_signed_with(DiscreteField(std::vector<double>{1.0, 0.0, 1.0}), Sign::plus));
  EXPECT_FALSE(no_double_zero(DiscreteField(std::vector<double>{1.0, 1e-12, 1.0})));
  EXPECT_STREQ(termination_name(Termination::ClosedLoop), "ClosedLoop");
}
