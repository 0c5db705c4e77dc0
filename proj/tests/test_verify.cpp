#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "plap/fixtures.hpp"
#include "plap/verify.hpp"

using namespace plap;

namespace {

const PropertyReport& only(const std::vector<PropertyReport>& reports) {
  EXPECT_EQ(reports.size(), 1u);
  return reports.front();
}

}  // namespace

TEST(Checks, OneSigned) {
  const PeriodicGrid g(fixtures::kTwoPi, 64);
  EXPECT_TRUE(check_one_signed(DiscreteField::sample(g, [](double x) { return 2.0 + std::cos(x); })).passed);
  EXPECT_FALSE(check_one_signed(DiscreteField::sample(g, [](double x) { return std::cos(x); })).passed);
  EXPECT_FALSE(check_one_signed(DiscreteField::sample(g, [](double x) { return 1.0 + std::cos(x); }), "", 1e-3).passed);
}

TEST(Checks, DoubleZeroDetection) {
  const PeriodicGrid g(fixtures::kTwoPi, 256);
  const auto simple = DiscreteField::sample(g, [](double x) { return std::sin(x); });
  EXPECT_TRUE(check_no_double_zero(simple, centered_difference(g, simple)).passed);
  const auto flat = detail::with_flat_zero(g);
  EXPECT_FALSE(check_no_double_zero(flat, centered_difference(g, flat)).passed);
}

TEST(Checks, SturmComparison) {
  const PeriodicGrid g(fixtures::kTwoPi, 512);
  const DiscreteField one(g.size(), 1.0), four(g.size(), 4.0);
  const auto u1 = DiscreteField::sample(g, [](double x) { return std::sin(x + 0.1); });
  const auto u2 = DiscreteField::sample(g, [](double x) { return std::sin(2.0 * x + 0.3); });
  EXPECT_TRUE(check_sturm(g, one, four, u1, u2).passed);
  EXPECT_TRUE(check_sturm(g, one, one, u1, -2.0 * u1).passed);
  const auto free = DiscreteField::sample(g, [](double x) { return 1.5 + std::cos(x); });
  EXPECT_FALSE(check_sturm(g, one, four, u1, free).passed);
  EXPECT_THROW(check_sturm(g, four, one, u1, u2), InapplicableFixture);
  EXPECT_THROW(check_sturm(g, one, four, free, u2), InapplicableFixture);
}

TEST(Checks, ConfinementMargins) {
  const PeriodicGrid g(fixtures::kTwoPi, 32);
  Branch inside;
  inside.seed = SeedKind::from_zero;
  BranchPoint pt;
  pt.u = DiscreteField(32, 0.5);
  inside.points.push_back(pt);
  EXPECT_TRUE(check_confinement(inside, {-2.0, -1.0, 1.0, 2.0}).passed);
  Branch outside = inside;
  outside.seed = SeedKind::from_infinity;
  EXPECT_FALSE(check_confinement(outside, {-2.0, -1.0, 1.0, 2.0}).passed);
  EXPECT_FALSE(check_confinement(Branch{}, {-2.0, -1.0, 1.0, 2.0}).passed);
}

TEST(Checks, NonexistenceWindow) {
  const ProblemSpec spec = fixtures::fourier(2.0, 256);
  ScanOptions scan;
  scan.resolution = 41;
  EXPECT_TRUE(check_nonexistence_window(spec, -1.0, 0.9, "", scan).passed);
  EXPECT_FALSE(check_nonexistence_window(spec, 0.5, 1.5, "", scan).passed);
}

TEST(Suite, RegistryNamesAreUniqueAndDefaultExcludesControls) {
  const auto reg = check_registry();
  std::vector<std::string> names;
  for (const auto& e : reg) names.push_back(e.name);
  auto sorted = names;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& n : default_suite()) EXPECT_NE(n.rfind("negative.", 0), 0u) << n;
  EXPECT_NE(std::find(names.begin(), names.end(), "control.sturm.can_fail"), names.end());
}

TEST(Suite, UnknownCheckIsAConfigError) {
  SuiteContext ctx;
  EXPECT_THROW(run_suite({"no.such.check"}, ctx), ConfigError);
}

TEST(Suite, EveryNegativeControlFails) {
  SuiteContext ctx(1, 2);
  for (const auto& name : {"negative.one_signed", "negative.no_double_zero", "negative.nonexistence_gap",
                           "negative.sturm", "negative.confinement"}) {
    const auto& r = only(run_suite({name}, ctx));
    EXPECT_FALSE(r.passed) << name;
  }
  for (const auto& name : {"control.one_signed.can_fail", "control.sturm.can_fail"}) {
    EXPECT_TRUE(only(run_suite({name}, ctx)).passed) << name;
  }
}

TEST(Suite, FastChecksPass) {
  SuiteContext ctx(1, 4);
  const auto reports = run_suite({"eigen.residual", "eigen.ordering", "eigen.one_signed", "sturm.comparison"}, ctx);
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name << " " << r.fixture_id;
}

TEST(Suite, ReportsAreIndependentOfJobs) {
  SuiteContext a(3, 1), b(3, 4);
  const std::vector<std::string> names{"eigen.residual", "eigen.simplicity"};
  const auto ra = run_suite(names, a), rb = run_suite(names, b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].name, rb[i].name);
    EXPECT_EQ(ra[i].fixture_id, rb[i].fixture_id);
    EXPECT_EQ(ra[i].evidence, rb[i].evidence);
  }
}

TEST(OracleComparison, RationalBranchPointIsReproduced) {
  const ProblemSpec spec = fixtures::cosine(2.0, 128);
  const auto f = fixtures::rational(spec);
  ContinuationControls c;
  c.norm_cap = 3.0;
  const Branch br = continue_from_zero(spec, f, Sign::plus, Sign::plus, c);
  ASSERT_GE(br.points.size(), 3u);
  const BranchPoint& pt = br.points[br.points.size() / 2];
  const OracleComparison cmp = compare_with_oracle(spec, f, pt.lambda, pt.u);
  EXPECT_LE(cmp.error_richardson, 1e-4);
  EXPECT_LE(cmp.lambda_error, 1e-4);
  EXPECT_GE(cmp.error_coarse / cmp.error_fine, 3.5);
}
