#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plap/discrete_operator.hpp"
#include "plap/fixtures.hpp"
#include "plap/gp_solver.hpp"

using namespace plap;

namespace {

DiscreteField random_rhs(const PeriodicGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  DiscreteField h(g.size());
  double a0 = d(rng), a1 = d(rng), b1 = d(rng), a3 = d(rng);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = 2.0 * std::numbers::pi * g.node(i) / g.period();
    h[i] = a0 + a1 * std::cos(x) + b1 * std::sin(x) + a3 * std::cos(3.0 * x) + 0.2 * d(rng);
  }
  return h;
}

double solution_error_cos(std::size_t n) {
  const ProblemSpec spec = fixtures::cosine(2.0, n).with_weight(DiscreteField(n, 1.0));
  const auto rhs = DiscreteField::sample(spec.grid(), [](double x) { return std::cos(x); });
  const auto u = solve_auxiliary(spec, rhs).u;
  const auto exact = DiscreteField::sample(spec.grid(), [](double x) { return 0.5 * std::cos(x); });
  return sup_distance(u, exact);
}

}  // namespace

TEST(GpSolver, ConstantRightHandSideGivesConstantSolution) {
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::constant(p, 1.0, 64);
    const auto r = solve_auxiliary(spec, DiscreteField(64, 8.0));
    const double expected = phi_p_inverse(spec.p(), 8.0);
    for (double v : r.u) EXPECT_NEAR(v, expected, 1e-10 * expected);
  }
}

TEST(GpSolver, ZeroRightHandSideGivesZero) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto r = solve_auxiliary(fixtures::constant(p, 1.0, 32), DiscreteField(32));
    EXPECT_EQ(sup_norm(r.u), 0.0);
    EXPECT_EQ(r.iterations, 0);
  }
}

TEST(GpSolver, CosineRightHandSideHalvesAtPTwo) {
  const double e64 = solution_error_cos(64);
  EXPECT_LT(e64, 2.0 * std::pow(2.0 * std::numbers::pi / 64.0, 2));
}

TEST(GpSolver, MeshRefinementRatio) {
  const double e1 = solution_error_cos(64), e2 = solution_error_cos(128), e3 = solution_error_cos(256);
  EXPECT_GE(e1 / e2, 3.5);
  EXPECT_GE(e2 / e3, 3.5);
}

TEST(GpSolver, UniqueSolutionFromAnyInitialGuess) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> d(0.0, 3.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::cosine(p, 128);
    for (int k = 0; k < 10; ++k) {
      const DiscreteField rhs = random_rhs(spec.grid(), rng);
      const DiscreteField ref = solve_auxiliary(spec, rhs).u;
      for (int j = 0; j < 5; ++j) {
        DiscreteField guess(128);
        for (auto& v : guess) v = d(rng);
        const DiscreteField u = solve_auxiliary(spec, rhs, {}, &guess).u;
        EXPECT_LE(sup_distance(u, ref), 1e-8 * std::max(1.0, sup_norm(ref))) << "p=" << p << " rhs " << k;
      }
    }
  }
}

TEST(GpSolver, ResidualCertificate) {
  std::mt19937_64 rng(5);
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::cosine(p, 128);
    for (int k = 0; k < 5; ++k) {
      const DiscreteField rhs = random_rhs(spec.grid(), rng);
      SolveOptions opts;
      const SolveResult r = solve_auxiliary(spec, rhs, opts);
      const double recomputed = euclidean_norm(apply_operator(spec, r.u) - rhs);
      EXPECT_NEAR(recomputed, r.residual_norm, 1e-9 * euclidean_norm(rhs));
      EXPECT_LE(recomputed,
                std::max(opts.tol_residual * euclidean_norm(rhs), detail::rounding_floor(spec, r.u)) * (1.0 + 1e-6));
    }
  }
}

TEST(GpSolver, SolutionMapIsMonotone) {
  std::mt19937_64 rng(9);
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::cosine(p, 128);
    for (int k = 0; k < 10; ++k) {
      const DiscreteField h1 = random_rhs(spec.grid(), rng), h2 = random_rhs(spec.grid(), rng);
      const DiscreteField u1 = solve_auxiliary(spec, h1).u, u2 = solve_auxiliary(spec, h2).u;
      EXPECT_GE(grid_dot(spec.grid(), h1 - h2, u1 - u2), -1e-10);
    }
  }
}

TEST(GpSolver, ComparisonPrinciple) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::cosine(p, 128);
    DiscreteField lo = random_rhs(spec.grid(), rng), hi = lo;
    for (auto& v : hi) v += d(rng);
    const DiscreteField ulo = solve_auxiliary(spec, lo).u, uhi = solve_auxiliary(spec, hi).u;
    EXPECT_GE(min_value(uhi - ulo), -1e-9);
  }
}

TEST(GpSolver, RejectsInvalidOptionsAndGrids) {
  const ProblemSpec spec = fixtures::constant(2.0, 1.0, 16);
  SolveOptions bad;
  bad.tol_residual = 0.0;
  EXPECT_THROW(solve_auxiliary(spec, DiscreteField(16, 1.0), bad), ConfigError);
  EXPECT_THROW(solve_auxiliary(spec, DiscreteField(15, 1.0)), GridMismatch);
}

TEST(Jacobian, SymmetricBilinearForm) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d(0.0, 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const ProblemSpec spec = fixtures::cosine(p, 64);
    DiscreteField u(64), v(64), w(64);
    for (std::size_t i = 0; i < 64; ++i) {
      u[i] = d(rng);
      v[i] = d(rng);
      w[i] = d(rng);
    }
    const double a = dot(w, jacobian_apply(spec, u, v, 1e-10));
    const double b = dot(v, jacobian_apply(spec, u, w, 1e-10));
    EXPECT_NEAR(a, b, 1e-10 * (std::fabs(a) + 1.0));
  }
}

TEST(Jacobian, MatchesFiniteDifferenceAtPThree) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> d(0.0, 1.0);
  const ProblemSpec spec = fixtures::cosine(3.0, 64);
  DiscreteField u(64), v(64);
  for (std::size_t i = 0; i < 64; ++i) {
    u[i] = d(rng);
    v[i] = d(rng);
  }
  const double delta = 1e-6;
  const DiscreteField fd =
      (1.0 / (2.0 * delta)) * (apply_operator(spec, u + delta * v) - apply_operator(spec, u - delta * v));
  const DiscreteField jv = jacobian_apply(spec, u, v, 0.0);
  EXPECT_LE(euclidean_norm(fd - jv), 1e-6 * euclidean_norm(jv));
}
