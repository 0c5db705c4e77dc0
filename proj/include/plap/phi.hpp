#pragma once

#include <cmath>
#include <string>

#include "plap/errors.hpp"

namespace plap {

/// Exponent p of the p-Laplacian, always strictly greater than one.
class PExponent {
 public:
  explicit PExponent(double p) : p_(p) {
    if (!std::isfinite(p) || !(p > 1.0)) {
      throw ConfigError("exponent p must satisfy p > 1 (got " + std::to_string(p) + ")");
    }
    conj_ = p / (p - 1.0);
  }

  double value() const noexcept { return p_; }
  /// p' with 1/p + 1/p' = 1.
  double conjugate() const noexcept { return conj_; }

  friend bool operator==(const PExponent&, const PExponent&) = default;

 private:
  double p_;
  double conj_;
};

namespace detail {

// |s|^{e} * sign(s), with fast paths for the exponents hit by the usual fixtures.
inline double signed_power(double s, double e) noexcept {
  if (s == 0.0) return 0.0;
  const double a = std::fabs(s);
  double r;
  if (e == 1.0) {
    r = a;
  } else if (e == 2.0) {
    r = a * a;
  } else if (e == 0.5) {
    r = std::sqrt(a);
  } else {
    r = std::pow(a, e);
  }
  return std::copysign(r, s);
}

}  // namespace detail

/// phi_p(s) = |s|^{p-2} s.
inline double phi_p(const PExponent& p, double s) noexcept {
  return detail::signed_power(s, p.value() - 1.0);
}

/// Inverse of phi_p, which equals phi_{p'}.
inline double phi_p_inverse(const PExponent& p, double v) noexcept {
  return detail::signed_power(v, p.conjugate() - 1.0);
}

/// Regularized derivative (p-1)(s^2 + eps^2)^{(p-2)/2}; exact when eps == 0.
inline double dphi_p(const PExponent& p, double s, double eps) noexcept {
  const double pm2 = p.value() - 2.0;
  if (pm2 == 0.0) return 1.0;
  const double r2 = s * s + eps * eps;
  if (pm2 == 1.0) return 2.0 * std::sqrt(r2);
  return (p.value() - 1.0) * std::pow(r2, 0.5 * pm2);
}

/// |s|^p.
inline double abs_pow(const PExponent& p, double s) noexcept {
  const double a = std::fabs(s);
  if (p.value() == 2.0) return a * a;
  if (a == 0.0) return 0.0;
  return std::pow(a, p.value());
}

}  // namespace plap
