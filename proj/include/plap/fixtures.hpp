#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "plap/coefficients.hpp"
#include "plap/nonlinearity.hpp"
#include "plap/problem.hpp"

namespace plap::fixtures {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// q = 1, m = 1 on [0, T): lambda0+ = 1 with a constant eigenfunction.
inline ProblemSpec constant(double p, double period = 1.0, std::size_t n = 256) {
  return {PExponent(p), PeriodicGrid(period, n), Coefficient::constant(1.0), Coefficient::constant(1.0)};
}

/// q = 1, m = 1, T = 2 pi: for p = 2 the eigenvalues are 1 + k^2.
inline ProblemSpec fourier(double p = 2.0, std::size_t n = 512) { return constant(p, kTwoPi, n); }

/// q = 1, m = cos x, T = 2 pi: sign-changing weight, lambda0- = -lambda0+ by a half-period shift.
inline ProblemSpec cosine(double p = 2.0, std::size_t n = 256) {
  return {PExponent(p), PeriodicGrid(kTwoPi, n), Coefficient::constant(1.0), Coefficient::cosine(0.0, 1.0, 1)};
}

/// f0 = 1, finf = 2.
inline NonlinearitySpec rational(const ProblemSpec& s) { return NonlinearitySpec::rational(s.p(), 1.0, 2.0); }

/// f(s) = s (1 - s^2)(4 - s^2)/(1 + s^4): zeros -2, -1, 1, 2; f0 = 4, finf = 1.
inline NonlinearitySpec a7(const ProblemSpec& s) { return NonlinearitySpec::a7(s.p(), {-2.0, -1.0, 1.0, 2.0}); }

/// f(s) = sign(s) sqrt|s|: f0 = inf, finf = 0 for p = 2.
inline NonlinearitySpec square_root(const ProblemSpec& s) { return NonlinearitySpec::power(s.p(), 0.5); }

/// f(s) = phi_p(s)(1 + s^2): f0 = 1, finf = inf.
inline NonlinearitySpec superlinear(const ProblemSpec& s) { return NonlinearitySpec::superlinear(s.p(), 1.0); }

struct EigenFixture {
  std::string id;
  ProblemSpec spec;
};

inline std::vector<EigenFixture> eigen_fixtures() {
  return {{"constant_p1.5", constant(1.5)}, {"constant_p2", constant(2.0)}, {"constant_p3", constant(3.0)},
          {"fourier_p2", fourier(2.0, 256)}, {"cosine_p1.5", cosine(1.5)}, {"cosine_p2", cosine(2.0)},
          {"cosine_p3", cosine(3.0)}};
}

}  // namespace plap::fixtures
