#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plap/errors.hpp"
#include "plap/field.hpp"
#include "plap/phi.hpp"

namespace plap {

/// Zeros t2 <= t1 < 0 < s1 <= s2 of a nonlinearity without the signum condition.
struct A7Zeros {
  double t2 = 0.0;
  double t1 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  void validate() const {
    if (!(t2 <= t1 && t1 < 0.0 && 0.0 < s1 && s1 <= s2)) {
      throw ConfigError("zero pattern must satisfy t2 <= t1 < 0 < s1 <= s2");
    }
  }
  friend bool operator==(const A7Zeros&, const A7Zeros&) = default;
};

enum class Cutoff { none, f_lower_n, f_upper_n, g_lower_n, g_upper_n };

inline const char* cutoff_name(Cutoff c) {
  switch (c) {
    case Cutoff::none: return "none";
    case Cutoff::f_lower_n: return "f_n";
    case Cutoff::f_upper_n: return "f^n";
    case Cutoff::g_lower_n: return "g_n";
    case Cutoff::g_upper_n: return "g^n";
  }
  return "none";
}

inline Cutoff parse_cutoff(const std::string& s) {
  for (Cutoff c : {Cutoff::none, Cutoff::f_lower_n, Cutoff::f_upper_n, Cutoff::g_lower_n, Cutoff::g_upper_n}) {
    if (s == cutoff_name(c)) return c;
  }
  throw ConfigError("unknown cut-off '" + s + "' (expected none, f_n, f^n, g_n, g^n)");
}

/// The nonlinearity f of -(phi_p(u'))' + q phi_p(u) = lambda m f(u), with its declared limits
/// f0 = lim_{s->0} f(s)/phi_p(s) and finf = lim_{|s|->inf} f(s)/phi_p(s) (each may be +inf).
class NonlinearitySpec {
 public:
  using Fn = std::function<double(double)>;
  using Params = std::vector<std::pair<std::string, double>>;

  NonlinearitySpec(std::string family, Params params, PExponent p, Fn f, Fn df, double f0, double finf,
                   std::optional<A7Zeros> zeros = std::nullopt)
      : family_(std::move(family)),
        params_(std::move(params)),
        p_(p),
        f_(std::move(f)),
        df_(std::move(df)),
        f0_(f0),
        finf_(finf),
        zeros_(zeros) {
    if (zeros_) zeros_->validate();
    if (!(f0_ >= 0.0) || !(finf_ >= 0.0)) throw ConfigError("declared f0 and finf must be >= 0 or +inf");
  }

  /// c phi_p(s).
  static NonlinearitySpec phi(PExponent p, double c = 1.0) {
    if (!(c > 0.0)) throw ConfigError("phi_p family needs c > 0");
    return {"phi_p", {{"c", c}}, p, [p, c](double s) { return c * phi_p(p, s); },
            [p, c](double s) { return c * dphi_p(p, s, 0.0); }, c, c};
  }

  /// phi_p(s) (a + b s^2)/(1 + s^2): f0 = a, finf = b.
  static NonlinearitySpec rational(PExponent p, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("rational family needs a > 0 and b > 0");
    auto g = [a, b](double s) { return (a + b * s * s) / (1.0 + s * s); };
    auto dg = [a, b](double s) { return 2.0 * s * (b - a) / ((1.0 + s * s) * (1.0 + s * s)); };
    return {"rational", {{"a", a}, {"b", b}}, p, [p, g](double s) { return phi_p(p, s) * g(s); },
            [p, g, dg](double s) { return dphi_p(p, s, 0.0) * g(s) + phi_p(p, s) * dg(s); }, a, b};
  }

  /// sign(s)|s|^gamma.
  static NonlinearitySpec power(PExponent p, double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("power family needs gamma > 0");
    const double e = gamma - (p.value() - 1.0);
    const double f0 = e < 0.0 ? kInfinity() : (e == 0.0 ? 1.0 : 0.0);
    const double finf = e > 0.0 ? kInfinity() : (e == 0.0 ? 1.0 : 0.0);
    return {"power", {{"gamma", gamma}}, p,
            [gamma](double s) { return s == 0.0 ? 0.0 : std::copysign(std::pow(std::fabs(s), gamma), s); },
            [gamma](double s) { return gamma * std::pow(std::fabs(s), gamma - 1.0); }, f0, finf};
  }

  /// phi_p(s) (s - t2)(s - t1)(s - s1)(s - s2)/(1 + s^4): f0 = t1 t2 s1 s2, finf = 1.
  static NonlinearitySpec a7(PExponent p, A7Zeros z) {
    z.validate();
    auto g = [z](double s) { return (s - z.t2) * (s - z.t1) * (s - z.s1) * (s - z.s2) / (1.0 + s * s * s * s); };
    auto dg = [z](double s) {
      const double a = s - z.t2, b = s - z.t1, c = s - z.s1, d = s - z.s2;
      const double num = a * b * c * d;
      const double dnum = b * c * d + a * c * d + a * b * d + a * b * c;
      const double den = 1.0 + s * s * s * s;
      return (dnum * den - num * 4.0 * s * s * s) / (den * den);
    };
    return {"a7",
            {{"t2", z.t2}, {"t1", z.t1}, {"s1", z.s1}, {"s2", z.s2}},
            p,
            [p, g](double s) { return phi_p(p, s) * g(s); },
            [p, g, dg](double s) { return dphi_p(p, s, 0.0) * g(s) + phi_p(p, s) * dg(s); },
            z.t1 * z.t2 * z.s1 * z.s2,
            1.0,
            z};
  }

  /// phi_p(s) (c + s^2): f0 = c, finf = +inf.
  static NonlinearitySpec superlinear(PExponent p, double c = 1.0) {
    if (!(c > 0.0)) throw ConfigError("superlinear family needs c > 0");
    return {"superlinear", {{"c", c}}, p, [p, c](double s) { return phi_p(p, s) * (c + s * s); },
            [p, c](double s) { return dphi_p(p, s, 0.0) * (c + s * s) + phi_p(p, s) * 2.0 * s; }, c, kInfinity()};
  }

  /// Named family with parameters, as read from a configuration.
  static NonlinearitySpec from_family(PExponent p, const std::string& family, const std::map<std::string, double>& v) {
    auto get = [&](const char* key, std::optional<double> fallback = std::nullopt) {
      auto it = v.find(key);
      if (it != v.end()) return it->second;
      if (fallback) return *fallback;
      throw ConfigError("nonlinearity family '" + family + "' needs parameter f." + key);
    };
    if (family == "phi_p") return phi(p, get("c", 1.0));
    if (family == "rational") return rational(p, get("a"), get("b"));
    if (family == "power") return power(p, get("gamma"));
    if (family == "a7") return a7(p, {get("t2"), get("t1"), get("s1"), get("s2")});
    if (family == "superlinear") return superlinear(p, get("c", 1.0));
    throw ConfigError("unknown nonlinearity family '" + family +
                      "' (expected phi_p, rational, power, a7, superlinear)");
  }

  double operator()(double s) const { return f_(s); }
  double derivative(double s) const { return df_(s); }

  const std::string& family() const noexcept { return family_; }
  const Params& params() const noexcept { return params_; }
  const PExponent& p() const noexcept { return p_; }
  double f0() const noexcept { return f0_; }
  double finf() const noexcept { return finf_; }
  const std::optional<A7Zeros>& a7_zeros() const noexcept { return zeros_; }
  Cutoff cutoff() const noexcept { return cutoff_; }
  double cutoff_n() const noexcept { return cutoff_n_; }

  /// Cut-off approximations used to reduce infinite limits to finite ones:
  ///   f_n  = f on [-n, n], n phi_p beyond 2n, linear in between   (f0 kept, finf = n);
  ///   f^n  = phi_p/n on [-1/n, 1/n], f beyond 2/n, linear between (f0 = 1/n, finf kept);
  ///   g_n  = same construction as f^n;
  ///   g^n  = n phi_p on [-1/n, 1/n], f beyond 2/n, linear between (f0 = n, finf kept).
  NonlinearitySpec with_cutoff(Cutoff kind, double n) const {
    if (kind == Cutoff::none) return *this;
    if (!(n > 0.0)) throw ConfigError("cut-off index n must be positive");
    if (cutoff_ != Cutoff::none) throw ConfigError("cut-offs do not compose");
    NonlinearitySpec out = *this;
    out.cutoff_ = kind;
    out.cutoff_n_ = n;
    const PExponent p = p_;
    const Fn f = f_, df = df_;
    if (kind == Cutoff::f_lower_n) {
      const double top = n * phi_p(p, 2.0 * n);
      const double fp = f(n), fm = f(-n);
      out.f_ = [=](double s) {
        if (std::fabs(s) <= n) return f(s);
        if (s > n && s < 2.0 * n) return (top - fp) / n * (s - n) + fp;
        if (s < -n && s > -2.0 * n) return (top + fm) / n * (s + n) + fm;
        return n * phi_p(p, s);
      };
      out.df_ = [=](double s) {
        if (std::fabs(s) <= n) return df(s);
        if (s > n && s < 2.0 * n) return (top - fp) / n;
        if (s < -n && s > -2.0 * n) return (top + fm) / n;
        return n * dphi_p(p, s, 0.0);
      };
      out.finf_ = n;
    } else {
      const double c = kind == Cutoff::g_upper_n ? n : 1.0 / n;
      const double a = 1.0 / n, b = 2.0 / n;
      const double fb = f(b), fmb = f(-b);
      const double edge = c * phi_p(p, a);
      out.f_ = [=](double s) {
        if (std::fabs(s) <= a) return c * phi_p(p, s);
        if (s > a && s < b) return (fb - edge) * (n * s - 2.0) + fb;
        if (s < -a && s > -b) return -(fmb + edge) * (n * s + 2.0) + fmb;
        return f(s);
      };
      out.df_ = [=](double s) {
        if (std::fabs(s) <= a) return c * dphi_p(p, s, 0.0);
        if (s > a && s < b) return (fb - edge) * n;
        if (s < -a && s > -b) return -(fmb + edge) * n;
        return df(s);
      };
      out.f0_ = c;
    }
    return out;
  }

  /// Checks f(0) = 0, the signum condition (or the declared zero pattern) and the declared limits.
  void validate() const {
    if (f_(0.0) != 0.0) throw ConfigError("nonlinearity must vanish at 0");
    std::vector<double> samples;
    for (int k = -4; k <= 3; ++k) {
      for (double mant : {1.0, 2.5, 5.0}) samples.push_back(mant * std::pow(10.0, k));
    }
    for (double s : samples) {
      for (double x : {s, -s}) {
        const double fx = f_(x);
        if (!std::isfinite(fx)) throw ConfigError("nonlinearity is not finite at s = " + std::to_string(x));
        if (zeros_) {
          if (!std::isfinite(fx) || expected_sign(x) * fx < 0.0) {
            throw ConfigError("nonlinearity sign does not match the declared zero pattern at s = " +
                              std::to_string(x));
          }
        } else if (!(fx * x > 0.0)) {
          throw ConfigError("signum condition f(s) s > 0 fails at s = " + std::to_string(x));
        }
      }
    }
    if (cutoff_ == Cutoff::none || cutoff_ == Cutoff::f_lower_n) check_limit(f0_, {1e-3, 1e-4, 1e-5}, "f0");
    if (cutoff_ == Cutoff::none || cutoff_ != Cutoff::f_lower_n) check_limit(finf_, {1e2, 1e3}, "finf");
  }

 private:
  int expected_sign(double s) const {
    const auto& z = *zeros_;
    if (s == 0.0 || s == z.t1 || s == z.t2 || s == z.s1 || s == z.s2) return 0;
    if ((s > z.t2 && s < z.t1) || (s > 0.0 && s < z.s1) || s > z.s2) return 1;
    return -1;
  }

  // Finite limits: every sample within 5%. Zero or infinite limits: the ratio moves monotonically
  // toward the limit and the last sample is within a factor 20 of it.
  void check_limit(double declared, std::initializer_list<double> points, const char* what) const {
    for (double sign : {1.0, -1.0}) {
      double prev = std::isinf(declared) ? -kInfinity() : kInfinity();
      double last = 0.0;
      for (double s : points) {
        const double x = sign * s;
        const double ratio = f_(x) / phi_p(p_, x);
        bool ok = true;
        if (std::isinf(declared)) {
          ok = ratio > prev;
        } else if (declared == 0.0) {
          ok = std::fabs(ratio) < prev;
        } else {
          ok = std::fabs(ratio - declared) <= 0.05 * declared;
        }
        prev = std::isinf(declared) ? ratio : std::fabs(ratio);
        last = ratio;
        if (!ok) fail_limit(declared, ratio, x, what);
      }
      if (std::isinf(declared) && !(last >= 20.0)) fail_limit(declared, last, sign * *(points.end() - 1), what);
      if (declared == 0.0 && !(std::fabs(last) <= 0.05)) fail_limit(declared, last, sign * *(points.end() - 1), what);
    }
  }

  [[noreturn]] static void fail_limit(double declared, double ratio, double x, const char* what) {
    throw ConfigError(std::string("declared ") + what + " = " + std::to_string(declared) +
                      " is inconsistent with f(s)/phi_p(s) = " + std::to_string(ratio) + " at s = " + std::to_string(x));
  }

  std::string family_;
  Params params_;
  PExponent p_;
  Fn f_;
  Fn df_;
  double f0_;
  double finf_;
  std::optional<A7Zeros> zeros_;
  Cutoff cutoff_ = Cutoff::none;
  double cutoff_n_ = 0.0;
};

}  // namespace plap
