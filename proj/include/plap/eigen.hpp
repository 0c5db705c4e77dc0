#pragma once

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "plap/discrete_operator.hpp"
#include "plap/errors.hpp"
#include "plap/gp_solver.hpp"
#include "plap/linalg.hpp"
#include "plap/problem.hpp"
#include "plap/shooting.hpp"

namespace plap {

enum class Sign { plus = 1, minus = -1 };

inline double sign_value(Sign s) noexcept { return s == Sign::plus ? 1.0 : -1.0; }
inline const char* sign_name(Sign s) noexcept { return s == Sign::plus ? "+" : "-"; }
inline Sign parse_sign(const std::string& s) {
  if (s == "+" || s == "plus" || s == "1" || s == "+1") return Sign::plus;
  if (s == "-" || s == "minus" || s == "-1") return Sign::minus;
  throw ConfigError("sign must be + or - (got '" + s + "')");
}

struct EigenOptions {
  SolveOptions solve{.tol_residual = 1e-12};
  int max_iterations = 2000;
  double lambda_tol = 1e-10;       // |lambda_{k+1} - lambda_k| <= lambda_tol (1 + |lambda_k|)
  double monotone_slack = 1e-12;   // allowed relative increase of the Rayleigh quotient per step
  int polish_iterations = 20;
  double polish_tol = 1e-13;
};

/// Principal eigenvalue, its eigenfunction normalized by nu * weight_integral(u) = 1, and diagnostics.
struct EigenPair {
  double lambda = 0.0;
  DiscreteField u;
  Sign nu = Sign::plus;
  double p = 2.0;
  double residual_norm = 0.0;        // ||L(u) - lambda m phi_p(u)||_2
  double relative_residual = 0.0;    // residual_norm / ||lambda m phi_p(u)||_2
  double normalization_error = 0.0;  // |nu * weight_integral(u) - 1|
  int iterations = 0;
};

namespace detail {

inline DiscreteField eigen_residual(const ProblemSpec& spec, const DiscreteField& u, double lambda,
                                    double* rhs_norm = nullptr) {
  DiscreteField rhs(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = lambda * spec.m()[i] * phi_p(spec.p(), u[i]);
  if (rhs_norm != nullptr) *rhs_norm = euclidean_norm(rhs);
  return apply_operator(spec, u) - rhs;
}

inline DiscreteField normalize_to_weight(const ProblemSpec& spec, DiscreteField u) {
  const double w = weight_integral(spec, u);
  if (!(w > 0.0)) throw DegenerateDenominator("trial function has nonpositive weighted integral");
  u *= 1.0 / std::pow(w, 1.0 / spec.p().value());
  return u;
}

// Smooth nonnegative bump on the longest cyclic run of nodes where m > 0.
inline DiscreteField positive_bump(const ProblemSpec& spec) {
  const auto& m = spec.m();
  const std::size_t n = m.size();
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!(m[s] > 0.0) || m[(s + n - 1) % n] > 0.0) continue;
    std::size_t len = 0;
    while (len < n && m[(s + len) % n] > 0.0) ++len;
    if (len > best_len) {
      best_len = len;
      best_start = s;
    }
  }
  if (best_len == 0) best_len = n;  // m > 0 everywhere
  DiscreteField u(n);
  for (std::size_t k = 0; k < best_len; ++k) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(best_len + 1));
    u[(best_start + k) % n] = s * s;
  }
  return u;
}

// Newton on [L(u) - lambda m phi_p(u); weight_integral(u) - 1]; keeps the input if it cannot improve it.
inline int polish_eigenpair(const ProblemSpec& spec, DiscreteField& u, double& lambda, const EigenOptions& opts) {
  const auto& m = spec.m();
  const auto& p = spec.p();
  const double h = spec.grid().spacing();
  double scale = 0.0;
  DiscreteField r = eigen_residual(spec, u, lambda, &scale);
  double norm = euclidean_norm(r);
  int it = 0;
  for (; it < opts.polish_iterations && norm > opts.polish_tol * scale; ++it) {
    BorderedSystem sys;
    sys.a = operator_jacobian(spec, u, opts.solve.epsilon_reg);
    DiscreteField col(u.size()), row(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      sys.a.diag[i] -= lambda * m[i] * dphi_p(p, u[i], opts.solve.epsilon_reg);
      col[i] = -m[i] * phi_p(p, u[i]);
      row[i] = p.value() * h * m[i] * phi_p(p, u[i]);
    }
    sys.cols = {col};
    sys.rows = {row};
    sys.corner = {{0.0}};
    BorderedSolution step;
    try {
      step = solve_bordered(sys, -1.0 * r, {1.0 - weight_integral(spec, u)});
    } catch (const NoConvergence&) {
      break;
    }
    DiscreteField u_new = u + step.main;
    const double l_new = lambda + step.extra[0];
    double scale_new = 0.0;
    DiscreteField r_new = eigen_residual(spec, u_new, l_new, &scale_new);
    const double norm_new = euclidean_norm(r_new);
    if (!(norm_new < norm) || !(min_value(u_new) > 0.0)) break;
    u = std::move(u_new);
    lambda = l_new;
    r = std::move(r_new);
    norm = norm_new;
    scale = scale_new;
  }
  return it;
}

// Principal pair for nu = + by Rayleigh-monotone inverse iteration on the split problem
//   -(phi_p(w'))' + (q + lambda_k m^-) phi_p(w) = lambda_k m^+ phi_p(u_k).
// With R_lambda(u) = (E(u) + lambda B^-(u)) / B^+(u) one has R(u) <= lambda  <=>  R_lambda(u) <= lambda,
// and the inverse power step never increases R_lambda, hence never increases R.
inline EigenPair principal_plus(const ProblemSpec& spec, const EigenOptions& opts, const DiscreteField* seed) {
  if (!spec.coeffs().weight_has_positive_part()) {
    throw InfeasibleConstraint("positive principal eigenvalue needs max m > 0");
  }
  const std::size_t n = spec.grid().size();
  const auto& m = spec.m();
  DiscreteField m_plus(n), m_minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    m_plus[i] = std::max(m[i], 0.0);
    m_minus[i] = std::max(-m[i], 0.0);
  }

  DiscreteField u;
  if (seed != nullptr) {
    require_on_grid(spec, *seed, "principal_eigen seed");
    u = *seed;
    if (mean(u) < 0.0) u *= -1.0;
    if (!(weight_integral(spec, u) > 0.0)) u = positive_bump(spec);
  } else if (mean(m) > 1e-10 * (mean(m_plus) + mean(m_minus))) {
    u = DiscreteField(n, 1.0);
  } else {
    u = positive_bump(spec);
  }
  u = normalize_to_weight(spec, std::move(u));
  double lambda = rayleigh(spec, u);

  int it = 0;
  bool converged = false;
  for (; it < opts.max_iterations; ++it) {
    DiscreteField potential = spec.q();
    DiscreteField rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      potential[i] += lambda * m_minus[i];
      rhs[i] = lambda * m_plus[i] * phi_p(spec.p(), u[i]);
    }
    const ProblemSpec split = spec.with_potential(potential);
    DiscreteField w = solve_auxiliary(split, rhs, opts.solve, &u).u;
    w = normalize_to_weight(spec, std::move(w));
    const double next = rayleigh(spec, w);
    if (next > lambda + opts.monotone_slack * (1.0 + std::fabs(lambda))) {
      throw NoConvergence("Rayleigh quotient increased during inverse iteration (" + std::to_string(lambda) +
                          " -> " + std::to_string(next) + ")");
    }
    const double change = std::fabs(next - lambda);
    u = std::move(w);
    lambda = next;
    if (change <= opts.lambda_tol * (1.0 + std::fabs(lambda))) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) throw NoConvergence("inverse iteration did not converge in " + std::to_string(it) + " steps");

  polish_eigenpair(spec, u, lambda, opts);

  if (mean(u) < 0.0) u *= -1.0;
  if (!(min_value(u) * max_value(u) > 0.0)) {
    throw SignChangeDetected("principal eigenfunction iterate changes sign");
  }
  EigenPair out;
  out.lambda = lambda;
  out.nu = Sign::plus;
  out.p = spec.p().value();
  double scale = 0.0;
  out.residual_norm = euclidean_norm(eigen_residual(spec, u, lambda, &scale));
  out.relative_residual = out.residual_norm / scale;
  out.normalization_error = std::fabs(weight_integral(spec, u) - 1.0);
  out.iterations = it;
  out.u = std::move(u);
  return out;
}

}  // namespace detail

/// Principal eigenpair (lambda_0^nu, u_0^nu). nu = - is obtained from the reflected weight -m.
inline EigenPair principal_eigen(const ProblemSpec& spec, Sign nu, const EigenOptions& opts = {},
                                 const DiscreteField* seed = nullptr) {
  if (nu == Sign::plus) return detail::principal_plus(spec, opts, seed);
  if (!spec.coeffs().weight_has_negative_part()) {
    throw InfeasibleConstraint("negative principal eigenvalue needs min m < 0");
  }
  EigenPair r = detail::principal_plus(spec.reflected(), opts, seed);
  r.lambda = -r.lambda;
  r.nu = Sign::minus;
  return r;
}

/// Richardson extrapolation (4 lambda_{2N} - lambda_N)/3 of the principal eigenvalue.
inline double richardson_eigenvalue(const ProblemSpec& spec, Sign nu, const EigenOptions& opts = {}) {
  const double coarse = principal_eigen(spec, nu, opts).lambda;
  const double fine = principal_eigen(spec.with_grid(spec.grid().refined()), nu, opts).lambda;
  return (4.0 * fine - coarse) / 3.0;
}

struct ScanFinding {
  OracleCandidate candidate;
  bool principal = false;
};

/// Outcome of scanning a window for eigenvalues with the shooting oracle.
struct IsolationReport {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> lambda0_plus;
  std::optional<double> lambda0_minus;
  std::optional<double> delta_plus;
  std::optional<double> delta_minus;
  double match_tol = 0.0;
  std::vector<ScanFinding> findings;
  bool passed = false;
};

/// Scans [lo, hi] for eigenvalues. Passes iff no candidate lies strictly between the principal
/// eigenvalues (beyond the matching tolerance) and every principal eigenvalue inside the window was
/// found. The isolation radii are half the distance to the nearest other candidate.
inline IsolationReport spectrum_scan(const ProblemSpec& spec, double lo, double hi, const ScanOptions& opts = {},
                                     const EigenOptions& eopts = {}) {
  if (!(lo < hi)) throw ConfigError("spectrum_scan needs lambda_lo < lambda_hi");
  IsolationReport rep;
  rep.lo = lo;
  rep.hi = hi;
  if (spec.coeffs().weight_has_positive_part()) rep.lambda0_plus = principal_eigen(spec, Sign::plus, eopts).lambda;
  if (spec.coeffs().weight_has_negative_part()) rep.lambda0_minus = principal_eigen(spec, Sign::minus, eopts).lambda;

  const auto candidates = oracle_scan(spec, lo, hi, opts);
  // Grid and oracle eigenvalues differ by the O(h^2) discretization error.
  const double h = spec.grid().spacing();
  auto tol_for = [&](double l) { return std::max(1e-6, 2.0 * h * h * (1.0 + std::fabs(l))); };
  rep.match_tol = tol_for(std::max(rep.lambda0_plus.value_or(0.0), -rep.lambda0_minus.value_or(0.0)));

  auto matches = [&](double c, const std::optional<double>& l0) {
    return l0 && std::fabs(c - *l0) <= tol_for(*l0);
  };
  for (const auto& c : candidates) {
    rep.findings.push_back({c, matches(c.lambda, rep.lambda0_plus) || matches(c.lambda, rep.lambda0_minus)});
  }

  auto radius = [&](const std::optional<double>& l0) -> std::optional<double> {
    if (!l0) return std::nullopt;
    double nearest = kInfinity();
    for (const auto& f : rep.findings) {
      if (matches(f.candidate.lambda, l0)) continue;
      nearest = std::min(nearest, std::fabs(f.candidate.lambda - *l0));
    }
    return std::isfinite(nearest) ? std::optional<double>(0.5 * nearest) : std::nullopt;
  };
  if (auto r = radius(rep.lambda0_plus)) rep.delta_plus = *rep.lambda0_plus + *r;
  if (auto r = radius(rep.lambda0_minus)) rep.delta_minus = *rep.lambda0_minus - *r;

  const double gap_lo = rep.lambda0_minus ? *rep.lambda0_minus + tol_for(*rep.lambda0_minus) : -kInfinity();
  const double gap_hi = rep.lambda0_plus ? *rep.lambda0_plus - tol_for(*rep.lambda0_plus) : kInfinity();
  bool ok = true;
  for (const auto& f : rep.findings) {
    if (!f.principal && f.candidate.lambda > gap_lo && f.candidate.lambda < gap_hi) ok = false;
  }
  auto found = [&](const std::optional<double>& l0) {
    if (!l0 || *l0 < lo || *l0 > hi) return true;
    return std::any_of(rep.findings.begin(), rep.findings.end(),
                       [&](const ScanFinding& f) { return matches(f.candidate.lambda, l0); });
  };
  rep.passed = ok && found(rep.lambda0_plus) && found(rep.lambda0_minus);
  return rep;
}

struct PSweepRow {
  double p = 0.0;
  std::optional<double> lambda_plus;
  std::optional<double> lambda_minus;
};

/// Principal eigenvalues along a sorted list of exponents, warm-starting every run from the
/// previous eigenfunction.
inline std::vector<PSweepRow> p_sweep(const ProblemSpec& base, const std::vector<double>& p_values,
                                      const EigenOptions& opts = {}) {
  for (double p : p_values) PExponent{p};
  if (!std::is_sorted(p_values.begin(), p_values.end())) throw ConfigError("p values must be sorted");
  std::vector<PSweepRow> rows;
  std::optional<DiscreteField> prev_plus, prev_minus;
  for (double p : p_values) {
    const ProblemSpec spec = base.with_exponent(p);
    PSweepRow row{p, std::nullopt, std::nullopt};
    if (spec.coeffs().weight_has_positive_part()) {
      EigenPair e = principal_eigen(spec, Sign::plus, opts, prev_plus ? &*prev_plus : nullptr);
      row.lambda_plus = e.lambda;
      prev_plus = std::move(e.u);
    }
    if (spec.coeffs().weight_has_negative_part()) {
      EigenPair e = principal_eigen(spec, Sign::minus, opts, prev_minus ? &*prev_minus : nullptr);
      row.lambda_minus = e.lambda;
      prev_minus = std::move(e.u);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace plap
