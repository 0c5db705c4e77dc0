#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plap/coefficients.hpp"
#include "plap/discrete_operator.hpp"
#include "plap/field.hpp"
#include "plap/fixtures.hpp"
#include "plap/phi.hpp"
#include "plap/problem.hpp"

using namespace plap;

TEST(PExponent, RejectsExponentsNotAboveOne) {
  EXPECT_THROW(PExponent(1.0), ConfigError);
  EXPECT_THROW(PExponent(0.5), ConfigError);
  EXPECT_THROW(PExponent(std::nan("")), ConfigError);
  EXPECT_DOUBLE_EQ(PExponent(3.0).conjugate(), 1.5);
  EXPECT_DOUBLE_EQ(PExponent(2.0).conjugate(), 2.0);
}

TEST(PhiP, InverseIsConjugatePhi) {
  for (double p : {1.5, 2.0, 3.0, 4.5}) {
    const PExponent pe(p);
    for (double s : {-3.0, -0.2, 0.0, 1e-8, 0.7, 5.0}) {
      EXPECT_NEAR(phi_p_inverse(pe, phi_p(pe, s)), s, 1e-12 * (1.0 + std::fabs(s)));
    }
  }
}

TEST(PhiP, OddAndHomogeneous) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-4.0, 4.0), t(0.1, 3.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const PExponent pe(p);
    for (int k = 0; k < 50; ++k) {
      const double s = d(rng), a = t(rng);
      EXPECT_NEAR(phi_p(pe, -s), -phi_p(pe, s), 1e-14);
      EXPECT_NEAR(phi_p(pe, a * s), std::pow(a, p - 1.0) * phi_p(pe, s), 1e-12 * (1.0 + std::fabs(phi_p(pe, a * s))));
    }
  }
}

TEST(PhiP, DerivativeMatchesDifferenceQuotient) {
  for (double p : {1.5, 2.0, 3.0}) {
    const PExponent pe(p);
    for (double s : {-2.0, -0.3, 0.4, 1.7}) {
      const double h = 1e-6;
      const double fd = (phi_p(pe, s + h) - phi_p(pe, s - h)) / (2.0 * h);
      EXPECT_NEAR(dphi_p(pe, s, 0.0), fd, 1e-6);
    }
  }
}

TEST(PeriodicGrid, NodesAndNeighboursWrap) {
  const PeriodicGrid g(2.0, 8);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
  EXPECT_EQ(g.next(7), 0u);
  EXPECT_EQ(g.prev(0), 7u);
  EXPECT_DOUBLE_EQ(g.node(3), 0.75);
  EXPECT_EQ(g.refined().size(), 16u);
  EXPECT_DOUBLE_EQ(g.refined().period(), 2.0);
}

TEST(DiscreteField, NormsAndInnerProducts) {
  const DiscreteField u(std::vector<double>{1.0, -3.0, 2.0, 0.0});
  EXPECT_DOUBLE_EQ(sup_norm(u), 3.0);
  EXPECT_DOUBLE_EQ(min_value(u), -3.0);
  EXPECT_DOUBLE_EQ(max_value(u), 2.0);
  EXPECT_DOUBLE_EQ(mean(u), 0.0);
  EXPECT_DOUBLE_EQ(dot(u, u), 14.0);
  EXPECT_DOUBLE_EQ(euclidean_norm(u), std::sqrt(14.0));
  EXPECT_DOUBLE_EQ(sup_distance(u, DiscreteField(4, 1.0)), 4.0);
}

TEST(DiscreteField, GridMismatchIsRejected) {
  const PeriodicGrid g(1.0, 8);
  EXPECT_THROW(require_on_grid(g, DiscreteField(7), "test"), GridMismatch);
  const ProblemSpec spec = fixtures::constant(2.0, 1.0, 8);
  EXPECT_THROW(apply_operator(spec, DiscreteField(9)), GridMismatch);
}

TEST(DiscreteField, SignChangesCountAroundThePeriod) {
  const PeriodicGrid g(2.0 * std::numbers::pi, 64);
  const auto c1 = DiscreteField::sample(g, [](double x) { return std::cos(x); });
  const auto c3 = DiscreteField::sample(g, [](double x) { return std::cos(3.0 * x); });
  EXPECT_EQ(count_sign_changes(c1.values()), 2);
  EXPECT_EQ(count_sign_changes(c3.values()), 6);
  EXPECT_EQ(count_sign_changes(DiscreteField(64, 1.0).values()), 0);
}

TEST(DiscreteField, ResampleIsExactForLinearPieces) {
  const PeriodicGrid coarse(1.0, 8);
  const auto u = DiscreteField::sample(coarse, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
  const auto fine = resample(coarse, u, coarse.refined());
  for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_DOUBLE_EQ(fine[2 * i], u[i]);
  EXPECT_DOUBLE_EQ(fine[1], 0.5 * (u[0] + u[1]));
}

TEST(Coefficient, KindsEvaluate) {
  EXPECT_DOUBLE_EQ(Coefficient::constant(2.5).evaluate(0.3, 1.0), 2.5);
  EXPECT_NEAR(Coefficient::cosine(1.0, 2.0, 1).evaluate(0.0, 2.0 * std::numbers::pi), 3.0, 1e-15);
  const auto pw = Coefficient::piecewise({0.5}, {1.0, -2.0});
  EXPECT_DOUBLE_EQ(pw.evaluate(0.25, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(pw.evaluate(0.75, 1.0), -2.0);
  EXPECT_THROW(Coefficient::piecewise({0.5}, {1.0}), ConfigError);
  EXPECT_THROW(Coefficient::samples({}), ConfigError);
}

TEST(ProblemSpec, RejectsInvalidPotential) {
  const PeriodicGrid g(1.0, 16);
  EXPECT_THROW(ProblemSpec(PExponent(2.0), g, Coefficient::constant(0.0), Coefficient::constant(1.0)), ConfigError);
  EXPECT_THROW(ProblemSpec(PExponent(2.0), g, Coefficient::constant(-1.0), Coefficient::constant(1.0)), ConfigError);
}

TEST(ProblemSpec, WeightSignClassification) {
  EXPECT_TRUE(fixtures::cosine().coeffs().sign_changing());
  EXPECT_FALSE(fixtures::constant(2.0).coeffs().weight_has_negative_part());
  EXPECT_TRUE(fixtures::cosine().reflected().coeffs().sign_changing());
}

TEST(Operator, ConstantsAreScaledByThePotential) {
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::constant(p, 1.0, 32);
    const auto r = apply_operator(spec, DiscreteField(32, 2.0));
    for (double v : r) EXPECT_NEAR(v, std::pow(2.0, p - 1.0), 1e-13);
  }
}

TEST(Operator, EnergyPairingIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::cosine(p, 64);
    DiscreteField u(64);
    for (auto& v : u) v = d(rng);
    const double pairing = grid_dot(spec.grid(), apply_operator(spec, u), u);
    EXPECT_NEAR(pairing, p_energy(spec, u), 1e-11 * p_energy(spec, u));
  }
}

TEST(Operator, RayleighRejectsNullWeight) {
  const ProblemSpec spec = fixtures::cosine(2.0, 64);
  EXPECT_THROW(rayleigh(spec, DiscreteField(64, 1.0)), DegenerateDenominator);
  EXPECT_NEAR(rayleigh(fixtures::constant(2.0, 1.0, 64), DiscreteField(64, 1.0)), 1.0, 1e-14);
}
