#pragma once

#include <spdlog/spdlog.h>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "plap/discrete_operator.hpp"
#include "plap/errors.hpp"
#include "plap/linalg.hpp"
#include "plap/problem.hpp"

namespace plap {

struct SolveOptions {
  double tol_residual = 1e-10;  // relative to the Euclidean norm of the right-hand side
  int max_newton = 60;
  double epsilon_reg = 1e-10;
  double damping = 0.5;
  int max_halvings = 30;
  int max_descent = 400;
  bool verbose = false;
};

struct SolveResult {
  DiscreteField u;
  double residual_norm = 0.0;
  int iterations = 0;
  bool used_fallback = false;
};

namespace detail {

// J(u) = p_energy(u)/p - h * sum rhs_i u_i; strictly convex, minimized by the solution.
inline double auxiliary_energy(const ProblemSpec& spec, const DiscreteField& u, const DiscreteField& rhs) {
  return p_energy(spec, u) / spec.p().value() - grid_dot(spec.grid(), rhs, u);
}

// Size of the residual produced by rounding u in the last bit. For p < 2 the flux phi_p(Du) is
// singular at Du = 0, so near-flat solutions cannot reach a purely relative tolerance.
inline double rounding_floor(const ProblemSpec& spec, const DiscreteField& u) {
  const auto& g = spec.grid();
  const double delta = 4.0 * std::numeric_limits<double>::epsilon() * sup_norm(u) / g.spacing();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = std::fabs(u[g.next(i)] - u[i]) / g.spacing();
    const double r = 2.0 * (phi_p(spec.p(), d + delta) - phi_p(spec.p(), d)) / g.spacing();
    s += r * r;
  }
  return std::sqrt(s);
}

struct AuxState {
  DiscreteField u;
  DiscreteField r;
  double norm;
};

inline AuxState aux_state(const ProblemSpec& spec, DiscreteField u, const DiscreteField& rhs) {
  DiscreteField r = apply_operator(spec, u) - rhs;
  const double n = euclidean_norm(r);
  return {std::move(u), std::move(r), n};
}

// One damped step along `dir`. Accepts on residual decrease or on Armijo decrease of the energy.
inline std::optional<AuxState> damped_step(const ProblemSpec& spec, const AuxState& s, const DiscreteField& dir,
                                           const DiscreteField& rhs, const SolveOptions& opts,
                                           bool energy_only) {
  const double e0 = auxiliary_energy(spec, s.u, rhs);
  const double slope = grid_dot(spec.grid(), s.r, dir);
  double alpha = 1.0;
  for (int k = 0; k <= opts.max_halvings; ++k, alpha *= opts.damping) {
    AuxState t = aux_state(spec, s.u + alpha * dir, rhs);
    if (!std::isfinite(t.norm)) continue;
    if (!energy_only && t.norm <= (1.0 - 1e-4 * alpha) * s.norm) return t;
    if (slope < 0.0) {
      const double e1 = auxiliary_energy(spec, t.u, rhs);
      if (e1 <= e0 + 1e-4 * alpha * slope && e1 < e0) return t;
    }
  }
  return std::nullopt;
}

// Dual (flux) Newton for p < 2. With z = phi_p(Du) on edges and w = phi_p(u) = (rhs - D^T z)/q
// on nodes, z solves phi_p'(z) = D phi_p'(w) with p' the conjugate exponent: the gradient of a
// convex function whose Hessian is a cyclic tridiagonal. Returns the primal state u = phi_p'(w).
inline std::optional<AuxState> dual_newton(const ProblemSpec& spec, const DiscreteField& rhs, const DiscreteField& u0,
                                           const SolveOptions& opts, const std::function<bool(const AuxState&)>& done,
                                           int& iterations) {
  const auto& g = spec.grid();
  const auto& q = spec.q();
  const PExponent pc(spec.p().conjugate());
  const std::size_t n = g.size();
  const double h = g.spacing();
  auto flux_out = [&](const DiscreteField& z) {
    DiscreteField w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = (rhs[i] - (z[g.prev(i)] - z[i]) / h) / q[i];
    return w;
  };
  auto gradient = [&](const DiscreteField& z, const DiscreteField& w) {
    DiscreteField f(n);
    for (std::size_t j = 0; j < n; ++j) {
      f[j] = phi_p(pc, z[j]) - (phi_p(pc, w[g.next(j)]) - phi_p(pc, w[j])) / h;
    }
    return f;
  };
  auto energy = [&](const DiscreteField& z, const DiscreteField& w) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e += (std::pow(std::fabs(z[i]), pc.value()) + q[i] * std::pow(std::fabs(w[i]), pc.value())) / pc.value();
    }
    return e;
  };
  auto primal = [&](const DiscreteField& w) {
    DiscreteField u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = phi_p(pc, w[i]);
    return aux_state(spec, std::move(u), rhs);
  };

  DiscreteField z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = phi_p(spec.p(), (u0[g.next(i)] - u0[i]) / h);
  DiscreteField w = flux_out(z);
  AuxState s = primal(w);
  for (int it = 0; it < opts.max_newton; ++it) {
    if (done(s)) return s;
    const DiscreteField f = gradient(z, w);
    CyclicTridiagonal jac{std::vector<double>(n), std::vector<double>(n)};
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = dphi_p(pc, w[i], opts.epsilon_reg) / (q[i] * h * h);
    for (std::size_t j = 0; j < n; ++j) {
      jac.diag[j] = dphi_p(pc, z[j], opts.epsilon_reg) + a[j] + a[g.next(j)];
      jac.off[j] = -a[g.next(j)];
    }
    const DiscreteField dir = solve_spd_cyclic(jac, -1.0 * f);
    const double e0 = energy(z, w);
    const double slope = dot(f, dir);
    const double fn = euclidean_norm(f);
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k <= opts.max_halvings && slope < 0.0; ++k, alpha *= opts.damping) {
      DiscreteField zt = z + alpha * dir;
      DiscreteField wt = flux_out(zt);
      const double e1 = energy(zt, wt);
      const bool armijo = e1 <= e0 + 1e-4 * alpha * slope;
      if (std::isfinite(e1) && (armijo || euclidean_norm(gradient(zt, wt)) <= (1.0 - 1e-4 * alpha) * fn)) {
        z = std::move(zt);
        w = std::move(wt);
        accepted = true;
        break;
      }
    }
    ++iterations;
    if (!accepted) return std::nullopt;
    s = primal(w);
    if (opts.verbose) spdlog::info("gp dual newton {:3d}  residual {:.3e}", iterations, s.norm);
  }
  if (done(s)) return s;
  return std::nullopt;
}

}  // namespace detail

/// Solves -(phi_p(u'))' + q phi_p(u) = rhs on the periodic grid.
///
/// Damped Newton with the regularized Jacobian; on stall, falls back to descent on the convex
/// energy with a heavier regularization, then resumes Newton. Acceptance is always judged on the
/// unregularized residual.
inline SolveResult solve_auxiliary(const ProblemSpec& spec, const DiscreteField& rhs, const SolveOptions& opts = {},
                                   const DiscreteField* initial_guess = nullptr) {
  require_on_grid(spec, rhs, "solve_auxiliary");
  if (!(opts.tol_residual > 0.0)) throw ConfigError("tol_residual must be positive");
  if (!(opts.epsilon_reg >= 0.0)) throw ConfigError("epsilon_reg must be nonnegative");

  const std::size_t n = spec.grid().size();
  const double scale = euclidean_norm(rhs);
  if (scale == 0.0) return {DiscreteField(n), 0.0, 0, false};
  const double target = opts.tol_residual * scale;

  DiscreteField u0(n);
  if (initial_guess != nullptr) {
    require_on_grid(spec, *initial_guess, "solve_auxiliary guess");
    u0 = *initial_guess;
  } else {
    const double qbar = mean(spec.q());
    for (std::size_t i = 0; i < n; ++i) u0[i] = phi_p_inverse(spec.p(), rhs[i] / qbar);
  }

  detail::AuxState s = detail::aux_state(spec, std::move(u0), rhs);
  int iterations = 0;
  bool used_fallback = false;

  auto done = [&] { return s.norm <= std::max(target, detail::rounding_floor(spec, s.u)); };
  auto newton = [&](int budget) {
    for (int it = 0; it < budget; ++it) {
      if (done()) return true;
      const CyclicTridiagonal jac = operator_jacobian(spec, s.u, opts.epsilon_reg);
      DiscreteField dir = solve_spd_cyclic(jac, -1.0 * s.r);
      auto next = detail::damped_step(spec, s, dir, rhs, opts, false);
      ++iterations;
      if (!next) return false;
      s = std::move(*next);
      if (opts.verbose) spdlog::info("gp newton {:3d}  residual {:.3e}", iterations, s.norm);
    }
    return done();
  };

  if (spec.p().value() < 2.0 && min_value(spec.q()) > 0.0 && !done()) {
    auto accept = [&](const detail::AuxState& t) {
      return t.norm <= std::max(target, detail::rounding_floor(spec, t.u));
    };
    if (auto d = detail::dual_newton(spec, rhs, s.u, opts, accept, iterations)) {
      return {std::move(d->u), d->norm, iterations, false};
    }
  }
  if (newton(opts.max_newton)) return {std::move(s.u), s.norm, iterations, false};

  // Fallback: descent on the convex energy, directions from a strongly regularized Jacobian.
  used_fallback = true;
  spdlog::debug("gp solver: Newton stalled at residual {:.3e}; switching to energy descent", s.norm);
  double eps_fb = std::max(1e-3 * (1.0 + sup_norm(s.u)) / spec.grid().period(), opts.epsilon_reg);
  for (int it = 0; it < opts.max_descent && !done(); ++it) {
    const CyclicTridiagonal jac = operator_jacobian(spec, s.u, eps_fb);
    DiscreteField dir = solve_spd_cyclic(jac, -1.0 * s.r);
    auto next = detail::damped_step(spec, s, dir, rhs, opts, true);
    ++iterations;
    if (!next) {
      if (eps_fb > 1e6) break;
      eps_fb *= 10.0;
      continue;
    }
    s = std::move(*next);
    eps_fb = std::max(opts.epsilon_reg, 0.5 * eps_fb);
    if (it % 10 == 9 && newton(opts.max_newton)) break;
  }
  if (!done()) newton(opts.max_newton);
  if (!done()) {
    throw NoConvergence("auxiliary solve did not converge: residual " + std::to_string(s.norm) +
                        " > " + std::to_string(target));
  }
  return {std::move(s.u), s.norm, iterations, used_fallback};
}

}  // namespace plap
