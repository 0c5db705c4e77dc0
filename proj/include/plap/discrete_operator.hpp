#pragma once

#include <cmath>
#include <vector>

#include "plap/errors.hpp"
#include "plap/field.hpp"
#include "plap/phi.hpp"
#include "plap/problem.hpp"

namespace plap {

/// Conservative finite-difference image of u:
///   r_i = -[phi_p(Du_i) - phi_p(Du_{i-1})]/h + q_i phi_p(u_i),  Du_i = (u_{i+1} - u_i)/h.
inline DiscreteField apply_operator(const ProblemSpec& spec, const DiscreteField& u) {
  require_on_grid(spec, u, "apply_operator");
  const auto& g = spec.grid();
  const auto& p = spec.p();
  const auto& q = spec.q();
  const std::size_t n = g.size();
  const double h = g.spacing();
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = phi_p(p, (u[g.next(i)] - u[i]) / h);
  DiscreteField r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = -(flux[i] - flux[g.prev(i)]) / h + q[i] * phi_p(p, u[i]);
  }
  return r;
}

/// p times the energy functional: h * sum(|Du_i|^p + q_i |u_i|^p).
inline double p_energy(const ProblemSpec& spec, const DiscreteField& u) {
  require_on_grid(spec, u, "p_energy");
  const auto& g = spec.grid();
  const auto& q = spec.q();
  const double h = g.spacing();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s += abs_pow(spec.p(), (u[g.next(i)] - u[i]) / h) + q[i] * abs_pow(spec.p(), u[i]);
  }
  return h * s;
}

/// p times the weight functional: h * sum m_i |u_i|^p.
inline double weight_integral(const ProblemSpec& spec, const DiscreteField& u) {
  require_on_grid(spec, u, "weight_integral");
  const auto& m = spec.m();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += m[i] * abs_pow(spec.p(), u[i]);
  return spec.grid().spacing() * s;
}

/// The W-norm (p_energy)^{1/p}.
inline double w_norm(const ProblemSpec& spec, const DiscreteField& u) {
  return std::pow(p_energy(spec, u), 1.0 / spec.p().value());
}

/// p_energy / weight_integral; rejects trials whose weighted integral is negligible.
inline double rayleigh(const ProblemSpec& spec, const DiscreteField& u) {
  const double e = p_energy(spec, u);
  const double w = weight_integral(spec, u);
  if (!(std::fabs(w) > 1e-12 * e)) {
    throw DegenerateDenominator("weighted integral of the trial function vanishes (" + std::to_string(w) +
                                " vs energy " + std::to_string(e) + ")");
  }
  return e / w;
}

/// Symmetric cyclic tridiagonal matrix: diag[i] on (i,i), off[i] on (i,i+1) and (i+1,i), wrapping at N-1.
struct CyclicTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }

  DiscreteField multiply(const DiscreteField& v) const {
    const std::size_t n = size();
    DiscreteField r(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = i + 1 == n ? 0 : i + 1;
      const std::size_t im = i == 0 ? n - 1 : i - 1;
      r[i] = diag[i] * v[i] + off[i] * v[ip] + off[im] * v[im];
    }
    return r;
  }
};

/// Linearization of apply_operator at u, built with the regularized derivative of phi_p.
inline CyclicTridiagonal operator_jacobian(const ProblemSpec& spec, const DiscreteField& u, double epsilon_reg) {
  require_on_grid(spec, u, "operator_jacobian");
  const auto& g = spec.grid();
  const auto& q = spec.q();
  const std::size_t n = g.size();
  const double h = g.spacing();
  const double h2 = h * h;
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = dphi_p(spec.p(), (u[g.next(i)] - u[i]) / h, epsilon_reg);
  CyclicTridiagonal j{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    j.diag[i] = (a[i] + a[g.prev(i)]) / h2 + q[i] * dphi_p(spec.p(), u[i], epsilon_reg);
    j.off[i] = -a[i] / h2;
  }
  return j;
}

/// Directional derivative of apply_operator at u in direction v.
inline DiscreteField jacobian_apply(const ProblemSpec& spec, const DiscreteField& u, const DiscreteField& v,
                                    double epsilon_reg) {
  require_on_grid(spec, v, "jacobian_apply");
  return operator_jacobian(spec, u, epsilon_reg).multiply(v);
}

}  // namespace plap
