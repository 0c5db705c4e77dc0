#include <gtest/gtest.h>

#include <cmath>

#include "plap/fixtures.hpp"
#include "plap/shooting.hpp"

using namespace plap;

TEST(Shooting, HarmonicOscillatorClosesOnEigenvalues) {
  const ProblemSpec spec = fixtures::fourier(2.0, 256);
  EXPECT_LT(mismatch(IvpSetup::eigen_form(spec, 1.0), 1.0, 0.0).norm(), 1e-9);
  EXPECT_GT(mismatch(IvpSetup::eigen_form(spec, 1.0), 0.3, -0.8).norm(), 1.0);
  for (double lam : {2.0, 5.0}) {
    const IvpSetup s = IvpSetup::eigen_form(spec, lam);
    EXPECT_LT(mismatch(s, 1.0, 0.0).norm(), 1e-9) << lam;
    EXPECT_LT(mismatch(s, 0.3, -0.8).norm(), 1e-9) << lam;
  }
  EXPECT_GT(mismatch(IvpSetup::eigen_form(spec, 1.5), 1.0, 0.0).norm(), 1e-2);
}

TEST(Shooting, TrajectoryReproducesCosine) {
  const IvpSetup s = IvpSetup::eigen_form(fixtures::fourier(2.0, 256), 2.0, 1024);
  const auto traj = trajectory(s, 1.0, 0.0);
  for (std::size_t j = 0; j < traj.size(); j += 64) {
    EXPECT_NEAR(traj[j], std::cos(fixtures::kTwoPi * j / 1024.0), 1e-10);
  }
}

TEST(Shooting, HamiltonianIsConservedForConstantCoefficients) {
  for (double p : {1.5, 3.0}) {
    const ProblemSpec spec = fixtures::constant(p, 1.0, 64);
    const double lam = 7.0;
    const PExponent pe(p);
    auto energy = [&](double u, double v) {
      return std::pow(std::fabs(v), pe.conjugate()) / pe.conjugate() + (lam - 1.0) * std::pow(std::fabs(u), p) / p;
    };
    const double u0 = 0.8, v0 = 0.1;
    auto drift = [&](int steps) {
      const IvpResult r = integrate(IvpSetup::eigen_form(spec, lam, steps), u0, v0);
      return std::fabs(energy(r.u_end, r.v_end) - energy(u0, v0)) / energy(u0, v0);
    };
    const double coarse = drift(8192), fine = drift(32768);
    EXPECT_LT(coarse, 1e-5) << "p=" << p;
    EXPECT_LT(fine, 0.5 * coarse) << "p=" << p;
  }
}

TEST(Shooting, SignChangesCountModes) {
  const ProblemSpec spec = fixtures::fourier(2.0, 256);
  EXPECT_EQ(orbit_sign_changes(IvpSetup::eigen_form(spec, 2.0), 1.0, 0.0), 2);
  EXPECT_EQ(orbit_sign_changes(IvpSetup::eigen_form(spec, 5.0), 1.0, 0.0), 4);
  EXPECT_EQ(orbit_sign_changes(IvpSetup::eigen_form(spec, 1.0), 1.0, 0.0), 0);
}

TEST(Shooting, OracleScanFindsFourierSpectrum) {
  const auto cands = oracle_scan(fixtures::fourier(2.0, 256), 0.5, 5.5);
  ASSERT_EQ(cands.size(), 3u);
  EXPECT_NEAR(cands[0].lambda, 1.0, 1e-6);
  EXPECT_NEAR(cands[1].lambda, 2.0, 1e-6);
  EXPECT_NEAR(cands[2].lambda, 5.0, 1e-6);
  EXPECT_EQ(cands[1].multiplicity, 2);
}

TEST(Shooting, MinimizingAngleOfCosineWeight) {
  const ProblemSpec spec = fixtures::cosine(2.0, 256);
  const IvpSetup s = IvpSetup::eigen_form(spec, 1.9);
  const AngleSearch a = minimize_over_angle(s);
  const auto [lam, theta] = refine_eigenvalue(s, 1.9, a.theta);
  EXPECT_NEAR(lam, 1.9052, 1e-3);
  EXPECT_LT(mismatch(s.with_lambda(lam), std::cos(theta), std::sin(theta)).norm(), 1e-9);
}

TEST(Shooting, PinnedMultipleShootingRecoversEigenvalue) {
  const ProblemSpec spec = fixtures::fourier(2.0, 256);
  const IvpSetup s = IvpSetup::eigen_form(spec, 1.2);
  const auto o = shoot_pinned(s, {1.0, 1.0, 1.0, 1.0}, {0.0, 0.0, 0.0, 0.0}, 1.2);
  ASSERT_TRUE(o.has_value());
  EXPECT_NEAR(o->lambda, 1.0, 1e-9);
  for (double u : o->u) EXPECT_NEAR(u, 1.0, 1e-8);
}

TEST(Shooting, NonlinearPeriodicOrbitsAreFound) {
  const ProblemSpec spec = fixtures::constant(2.0, 1.0, 64);
  const auto f = fixtures::rational(spec);
  // Constant solutions of u = lambda f(u) with lambda = 0.75: (1 + 2u^2)/(1 + u^2) = 4/3 gives u^2 = 1/2.
  const IvpSetup s = IvpSetup::nonlinear_form(spec, [f](double u) { return f(u); }, 0.75);
  const auto orbits = find_periodic(s, {{0.7, 0.0}});
  ASSERT_FALSE(orbits.empty());
  EXPECT_NEAR(orbits.front().u0, std::sqrt(0.5), 1e-8);
}

TEST(Shooting, RejectsTooFewSteps) {
  EXPECT_THROW(IvpSetup::eigen_form(fixtures::fourier(2.0, 256), 1.0, 100), ConfigError);
  EXPECT_THROW(oracle_scan(fixtures::fourier(2.0, 256), 2.0, 1.0), ConfigError);
}
