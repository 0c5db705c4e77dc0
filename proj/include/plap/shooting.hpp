#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "plap/errors.hpp"
#include "plap/field.hpp"
#include "plap/parallel.hpp"
#include "plap/phi.hpp"
#include "plap/problem.hpp"

namespace plap {

/// Initial value problem for the first-order system in the state (u, v = phi_p(u')):
///   u' = phi_p^{-1}(v),   v' = q phi_p(u) - lambda m g(u),
/// with g = phi_p (eigen form) or g = f (nonlinear form). Coefficients are evaluated from their
/// analytic families at every RK4 stage point, never interpolated from a grid solution.
class IvpSetup {
 public:
  using Scalar = std::function<double(double)>;

  IvpSetup(PExponent p, double period, const Scalar& q, const Scalar& m, double lambda, Scalar nonlinearity = {},
           int steps = 4096)
      : p_(p), period_(period), lambda_(lambda), f_(std::move(nonlinearity)), steps_(steps) {
    if (steps < 512) throw ConfigError("shooting oracle needs at least 512 steps");
    if (!(period > 0.0)) throw ConfigError("shooting oracle needs a positive period");
    auto tab = std::make_shared<Tables>();
    const std::size_t count = 2 * static_cast<std::size_t>(steps) + 1;
    tab->q.resize(count);
    tab->m.resize(count);
    const double half = period / (2.0 * steps);
    for (std::size_t k = 0; k < count; ++k) {
      const double x = half * static_cast<double>(k);
      tab->q[k] = q(x);
      tab->m[k] = m(x);
    }
    tables_ = std::move(tab);
  }

  static IvpSetup eigen_form(const ProblemSpec& spec, double lambda, int steps = 4096) {
    return IvpSetup(spec.p(), spec.grid().period(), [&](double x) { return spec.q_at(x); },
                    [&](double x) { return spec.m_at(x); }, lambda, {}, steps);
  }

  static IvpSetup nonlinear_form(const ProblemSpec& spec, Scalar f, double lambda, int steps = 4096) {
    return IvpSetup(spec.p(), spec.grid().period(), [&](double x) { return spec.q_at(x); },
                    [&](double x) { return spec.m_at(x); }, lambda, std::move(f), steps);
  }

  IvpSetup with_lambda(double lambda) const {
    IvpSetup s = *this;
    s.lambda_ = lambda;
    return s;
  }

  const PExponent& p() const noexcept { return p_; }
  double period() const noexcept { return period_; }
  double lambda() const noexcept { return lambda_; }
  int steps() const noexcept { return steps_; }
  bool eigen() const noexcept { return !f_; }
  const Scalar& nonlinearity() const noexcept { return f_; }

  // Right-hand side at stage point k (units of half steps).
  std::array<double, 2> rhs(std::size_t k, double u, double v) const {
    const double g = f_ ? f_(u) : phi_p(p_, u);
    return {phi_p_inverse(p_, v), tables_->q[k] * phi_p(p_, u) - lambda_ * tables_->m[k] * g};
  }

 private:
  struct Tables {
    std::vector<double> q;
    std::vector<double> m;
  };

  PExponent p_;
  double period_;
  double lambda_;
  Scalar f_;
  int steps_;
  std::shared_ptr<const Tables> tables_;
};

struct IvpResult {
  double u_end = 0.0;
  double v_end = 0.0;
  bool overflow = false;
};

struct PeriodicityMismatch {
  double du = 0.0;
  double dv = 0.0;
  double norm() const noexcept { return std::hypot(du, dv); }
};

namespace detail {

constexpr double kOverflow = 1e12;

// Fixed-step RK4 over steps j0..j1; `observer(j, u, v)` sees the state at every node in range.
template <typename Observer>
IvpResult rk4_range(const IvpSetup& s, int j0, int j1, double u, double v, Observer&& observer) {
  const double h = s.period() / s.steps();
  observer(j0, u, v);
  for (int j = j0; j < j1; ++j) {
    const std::size_t k = 2 * static_cast<std::size_t>(j);
    const auto k1 = s.rhs(k, u, v);
    const auto k2 = s.rhs(k + 1, u + 0.5 * h * k1[0], v + 0.5 * h * k1[1]);
    const auto k3 = s.rhs(k + 1, u + 0.5 * h * k2[0], v + 0.5 * h * k2[1]);
    const auto k4 = s.rhs(k + 2, u + h * k3[0], v + h * k3[1]);
    u += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    v += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    if (!(std::fabs(u) < kOverflow && std::fabs(v) < kOverflow)) return {u, v, true};
    observer(j + 1, u, v);
  }
  return {u, v, false};
}

// Fixed-step RK4 over one period.
template <typename Observer>
IvpResult rk4(const IvpSetup& s, double u, double v, Observer&& observer) {
  return rk4_range(s, 0, s.steps(), u, v, std::forward<Observer>(observer));
}

}  // namespace detail

/// Integrates one period from (u0, v0). Blow-up past 1e12 is reported through `overflow`.
inline IvpResult integrate(const IvpSetup& setup, double u0, double v0) {
  if (!std::isfinite(u0) || !std::isfinite(v0)) throw OracleFailure("non-finite initial data");
  return detail::rk4(setup, u0, v0, [](int, double, double) {});
}

/// u at every integration node 0..steps (steps + 1 values).
inline std::vector<double> trajectory(const IvpSetup& setup, double u0, double v0) {
  std::vector<double> out(static_cast<std::size_t>(setup.steps()) + 1, 0.0);
  detail::rk4(setup, u0, v0, [&](int j, double u, double) { out[static_cast<std::size_t>(j)] = u; });
  return out;
}

/// Oracle trajectory sampled at the nodes of `grid`; the step count must be a multiple of N.
inline DiscreteField sample_on_grid(const IvpSetup& setup, double u0, double v0, const PeriodicGrid& grid) {
  if (setup.steps() % static_cast<int>(grid.size()) != 0) {
    throw ConfigError("oracle steps must be a multiple of the grid size");
  }
  const auto traj = trajectory(setup, u0, v0);
  const std::size_t stride = static_cast<std::size_t>(setup.steps()) / grid.size();
  DiscreteField out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = traj[i * stride];
  return out;
}

inline PeriodicityMismatch mismatch(const IvpSetup& setup, double u0, double v0) {
  const IvpResult r = integrate(setup, u0, v0);
  if (r.overflow) return {kInfinity(), kInfinity()};
  return {r.u_end - u0, r.v_end - v0};
}

/// Minimum of a unimodal function on [a, b] by golden-section search.
template <typename F>
std::pair<double, double> golden_minimize(F&& fn, double a, double b, double tol, int max_iter = 200) {
  constexpr double r = 0.6180339887498949;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = fn(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

struct AngleSearch {
  double theta = 0.0;         // minimizing angle in [0, pi)
  double mismatch = 0.0;      // minimum of |mismatch| on the unit circle of initial data
  double max_mismatch = 0.0;  // maximum over the sampled angles
};

/// Minimizes the eigen-form mismatch over initial data (cos t, sin t). By homogeneity and
/// oddness every orbit crosses this half circle exactly once, so the search is one-dimensional.
inline AngleSearch minimize_over_angle(const IvpSetup& setup, int samples = 48, double tol = 1e-12) {
  const double pi = std::numbers::pi;
  auto fn = [&](double t) { return mismatch(setup, std::cos(t), std::sin(t)).norm(); };
  std::vector<double> vals(static_cast<std::size_t>(samples));
  double vmax = 0.0;
  for (int j = 0; j < samples; ++j) {
    vals[static_cast<std::size_t>(j)] = fn(pi * j / samples);
    vmax = std::max(vmax, vals[static_cast<std::size_t>(j)]);
  }
  // Refine the two deepest local minima of the periodic sample sequence.
  std::vector<int> minima;
  for (int j = 0; j < samples; ++j) {
    const double v = vals[static_cast<std::size_t>(j)];
    const double l = vals[static_cast<std::size_t>((j + samples - 1) % samples)];
    const double r = vals[static_cast<std::size_t>((j + 1) % samples)];
    if (v <= l && v <= r) minima.push_back(j);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) {
    return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)];
  });
  if (minima.size() > 2) minima.resize(2);
  AngleSearch best{0.0, kInfinity(), vmax};
  for (int j : minima) {
    const double step = pi / samples;
    auto [t, v] = golden_minimize(fn, pi * j / samples - step, pi * j / samples + step, tol);
    if (v < best.mismatch) {
      t = std::fmod(t, pi);
      if (t < 0.0) t += pi;
      best.theta = t;
      best.mismatch = v;
    }
  }
  return best;
}

struct PeriodicOrbit {
  double u0 = 0.0;
  double v0 = 0.0;
  double mismatch = 0.0;
};

struct FindOptions {
  double tol = 1e-9;        // accepted |mismatch|, relative to 1 + |(u0, v0)|
  int max_newton = 60;
  double merge_tol = 1e-6;
};

namespace detail {

inline std::optional<PeriodicOrbit> newton_periodic(const IvpSetup& setup, double u0, double v0,
                                                    const FindOptions& opts) {
  auto eval = [&](double a, double b) { return mismatch(setup, a, b); };
  PeriodicityMismatch r = eval(u0, v0);
  for (int it = 0; it < opts.max_newton; ++it) {
    if (!std::isfinite(r.norm())) return std::nullopt;
    if (r.norm() <= opts.tol * (1.0 + std::hypot(u0, v0))) return PeriodicOrbit{u0, v0, r.norm()};
    const double du = 1e-7 * (1.0 + std::fabs(u0));
    const double dv = 1e-7 * (1.0 + std::fabs(v0));
    const PeriodicityMismatch ru = eval(u0 + du, v0);
    const PeriodicityMismatch rv = eval(u0, v0 + dv);
    const double a = (ru.du - r.du) / du, b = (rv.du - r.du) / dv;
    const double c = (ru.dv - r.dv) / du, d = (rv.dv - r.dv) / dv;
    const double det = a * d - b * c;
    if (!std::isfinite(det) || det == 0.0) return std::nullopt;
    const double su = -(d * r.du - b * r.dv) / det;
    const double sv = -(-c * r.du + a * r.dv) / det;
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      const PeriodicityMismatch t = eval(u0 + alpha * su, v0 + alpha * sv);
      if (std::isfinite(t.norm()) && t.norm() < r.norm()) {
        u0 += alpha * su;
        v0 += alpha * sv;
        r = t;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  if (r.norm() <= opts.tol * (1.0 + std::hypot(u0, v0))) return PeriodicOrbit{u0, v0, r.norm()};
  return std::nullopt;
}

}  // namespace detail

struct PinnedOrbit {
  double lambda = 0.0;
  std::vector<double> u;  // state at the segment starts
  std::vector<double> v;
  double mismatch = 0.0;  // max continuity defect
};

/// Periodic orbit through u(0) = u0 with lambda free, by multiple shooting over `u.size()` equal
/// segments. Unknowns: v at 0, (u, v) at the other segment starts, and lambda; equations: the
/// continuity of (u, v) across every segment end (periodically). Damped Newton with a
/// finite-difference Jacobian. Splitting the period keeps exponentially dichotomous problems
/// (large lambda on the m < 0 part) well conditioned.
inline std::optional<PinnedOrbit> shoot_pinned(const IvpSetup& setup, std::vector<double> u, std::vector<double> v,
                                               double lambda, const FindOptions& opts = {}) {
  const std::size_t k = u.size();
  if (k == 0 || v.size() != k || setup.steps() % static_cast<int>(k) != 0) {
    throw ConfigError("multiple shooting needs matching segment starts dividing the step count");
  }
  const int len = setup.steps() / static_cast<int>(k);
  const std::size_t dim = 2 * k;
  auto pack = [&](const std::vector<double>& a, const std::vector<double>& b, double l) {
    Eigen::VectorXd z(dim);
    z(0) = b[0];
    for (std::size_t i = 1; i < k; ++i) {
      z(2 * i - 1) = a[i];
      z(2 * i) = b[i];
    }
    z(dim - 1) = l;
    return z;
  };
  const double u0 = u[0];
  auto defects = [&](const Eigen::VectorXd& z, bool& overflow) {
    const IvpSetup s = setup.with_lambda(z(dim - 1));
    Eigen::VectorXd r(dim);
    overflow = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double ui = i == 0 ? u0 : z(2 * i - 1), vi = i == 0 ? z(0) : z(2 * i);
      const int j0 = static_cast<int>(i) * len;
      const IvpResult e = detail::rk4_range(s, j0, j0 + len, ui, vi, [](int, double, double) {});
      overflow = overflow || e.overflow;
      const std::size_t nx = (i + 1) % k;
      const double un = nx == 0 ? u0 : z(2 * nx - 1), vn = nx == 0 ? z(0) : z(2 * nx);
      r(2 * i) = e.u_end - un;
      r(2 * i + 1) = e.v_end - vn;
    }
    return r;
  };
  Eigen::VectorXd z = pack(u, v, lambda);
  bool of = false;
  Eigen::VectorXd r = defects(z, of);
  const double scale = 1.0 + std::fabs(u0);
  auto done = [&] { return !of && r.lpNorm<Eigen::Infinity>() <= opts.tol * scale; };
  for (int it = 0; it < opts.max_newton && !done(); ++it) {
    if (of || !r.allFinite()) return std::nullopt;
    Eigen::MatrixXd jac(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
      Eigen::VectorXd zc = z;
      const double d = 1e-7 * (1.0 + std::fabs(z(static_cast<Eigen::Index>(c))));
      zc(static_cast<Eigen::Index>(c)) += d;
      bool ofc = false;
      jac.col(static_cast<Eigen::Index>(c)) = (defects(zc, ofc) - r) / d;
    }
    const Eigen::VectorXd step = -jac.fullPivLu().solve(r);
    if (!step.allFinite()) return std::nullopt;
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h, alpha *= 0.5) {
      const Eigen::VectorXd zt = z + alpha * step;
      bool oft = false;
      const Eigen::VectorXd rt = defects(zt, oft);
      if (!oft && rt.allFinite() && rt.norm() < r.norm()) {
        z = zt;
        r = rt;
        of = false;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!done()) return std::nullopt;
  PinnedOrbit o;
  o.lambda = z(dim - 1);
  o.u.assign(k, u0);
  o.v.assign(k, z(0));
  for (std::size_t i = 1; i < k; ++i) {
    o.u[i] = z(2 * i - 1);
    o.v[i] = z(2 * i);
  }
  o.mismatch = r.lpNorm<Eigen::Infinity>();
  return o;
}

/// Samples a multiple-shooting orbit on `grid`; steps must be a multiple of the node count.
inline DiscreteField sample_pinned(const IvpSetup& setup, const PinnedOrbit& o, const PeriodicGrid& grid) {
  const IvpSetup s = setup.with_lambda(o.lambda);
  if (s.steps() % static_cast<int>(grid.size()) != 0) throw ConfigError("steps must be a multiple of the node count");
  const int stride = s.steps() / static_cast<int>(grid.size());
  const int len = s.steps() / static_cast<int>(o.u.size());
  DiscreteField out(grid.size());
  for (std::size_t i = 0; i < o.u.size(); ++i) {
    const int j0 = static_cast<int>(i) * len;
    detail::rk4_range(s, j0, j0 + len, o.u[i], o.v[i], [&](int j, double uu, double) {
      if (j % stride == 0 && j < s.steps()) out[static_cast<std::size_t>(j / stride)] = uu;
    });
  }
  return out;
}

/// Periodic orbits reachable from the seeds. Eigen form: each seed fixes an angle bracket on the
/// unit circle and the angle is refined by golden section. Nonlinear form: 2D damped Newton on
/// the mismatch. Orbits closer than merge_tol are merged; an empty list is a valid answer.
inline std::vector<PeriodicOrbit> find_periodic(const IvpSetup& setup,
                                                const std::vector<std::pair<double, double>>& seeds,
                                                const FindOptions& opts = {}) {
  if (seeds.empty()) throw ConfigError("find_periodic needs at least one seed");
  std::vector<PeriodicOrbit> found;
  auto add = [&](PeriodicOrbit o) {
    for (const auto& e : found) {
      if (std::hypot(e.u0 - o.u0, e.v0 - o.v0) <= opts.merge_tol) return;
    }
    found.push_back(o);
  };
  const double pi = std::numbers::pi;
  for (const auto& [a, b] : seeds) {
    if (setup.eigen()) {
      const double t0 = std::atan2(b, a);
      const double w = pi / (2.0 * static_cast<double>(seeds.size()));
      auto fn = [&](double t) { return mismatch(setup, std::cos(t), std::sin(t)).norm(); };
      auto [t, v] = golden_minimize(fn, t0 - w, t0 + w, 1e-13);
      if (v <= opts.tol) {
        double u0 = std::cos(t), v0 = std::sin(t);
        if (u0 < 0.0 || (u0 == 0.0 && v0 < 0.0)) {
          u0 = -u0;
          v0 = -v0;
        }
        add({u0, v0, v});
      }
    } else if (auto o = detail::newton_periodic(setup, a, b, opts)) {
      add(*o);
    }
  }
  return found;
}

/// Number of sign changes of the orbit's u component over one period.
inline int orbit_sign_changes(const IvpSetup& setup, double u0, double v0) {
  const auto traj = trajectory(setup, u0, v0);
  double sup = 0.0;
  for (double x : traj) sup = std::max(sup, std::fabs(x));
  return count_sign_changes(std::span<const double>(traj.data(), traj.size() - 1), 1e-9 * sup);
}

struct OracleCandidate {
  double lambda = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
  double mismatch = 0.0;
  int multiplicity = 1;  // 2 when every initial angle closes up
  int sign_changes = 0;
};

struct ScanOptions {
  int resolution = 201;         // lambda samples in the window
  int angle_samples = 48;
  int steps = 4096;
  double accept_tol = 1e-6;     // refined mismatch below this is an eigenvalue
  double lambda_tol = 1e-10;
  int jobs = 1;
};

/// Candidate eigenvalues of the periodic problem in [lo, hi]: local minima of the angle-minimized
/// mismatch over a uniform lambda grid, refined by golden section and kept if they close up.
inline std::vector<OracleCandidate> oracle_scan(const ProblemSpec& spec, double lo, double hi,
                                                const ScanOptions& opts = {}) {
  if (!(lo < hi)) throw ConfigError("scan window needs lo < hi");
  if (opts.resolution < 3) throw ConfigError("scan resolution must be at least 3");
  const IvpSetup base = IvpSetup::eigen_form(spec, lo, opts.steps);
  const auto n = static_cast<std::size_t>(opts.resolution);
  std::vector<double> lam(n), val(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  parallel_for(n, opts.jobs, [&](std::size_t i) {
    val[i] = minimize_over_angle(base.with_lambda(lam[i]), opts.angle_samples).mismatch;
  });

  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || val[i] <= val[i - 1];
    const bool right = i + 1 == n || val[i] <= val[i + 1];
    if (left && right) minima.push_back(i);
  }
  std::vector<std::optional<OracleCandidate>> refined(minima.size());
  parallel_for(minima.size(), opts.jobs, [&](std::size_t c) {
    const std::size_t i = minima[c];
    const double a = lam[i == 0 ? 0 : i - 1];
    const double b = lam[i + 1 == n ? n - 1 : i + 1];
    auto fn = [&](double l) { return minimize_over_angle(base.with_lambda(l), opts.angle_samples).mismatch; };
    auto [l, v] = golden_minimize(fn, a, b, opts.lambda_tol);
    if (!(v <= opts.accept_tol)) return;
    const IvpSetup at = base.with_lambda(l);
    const AngleSearch s = minimize_over_angle(at, opts.angle_samples);
    OracleCandidate cand;
    cand.lambda = l;
    cand.u0 = std::cos(s.theta);
    cand.v0 = std::sin(s.theta);
    if (cand.u0 < 0.0) {
      cand.u0 = -cand.u0;
      cand.v0 = -cand.v0;
    }
    cand.mismatch = s.mismatch;
    cand.multiplicity = s.max_mismatch <= 1e3 * opts.accept_tol ? 2 : 1;
    cand.sign_changes = orbit_sign_changes(at, cand.u0, cand.v0);
    refined[c] = cand;
  });
  std::vector<OracleCandidate> out;
  for (auto& c : refined) {
    if (!c) continue;
    if (!out.empty() && std::fabs(out.back().lambda - c->lambda) <= 1e-7 * (1.0 + std::fabs(c->lambda))) {
      if (c->mismatch < out.back().mismatch) out.back() = *c;
      continue;
    }
    out.push_back(*c);
  }
  return out;
}

/// Eigenvalue polish by 2D Newton on (angle, lambda) with finite-difference Jacobian; valid for
/// simple eigenvalues. Returns the refined (lambda, angle) pair.
inline std::pair<double, double> refine_eigenvalue(const IvpSetup& setup, double lambda, double theta,
                                                   double tol = 1e-12, int max_iter = 40) {
  auto eval = [&](double l, double t) { return mismatch(setup.with_lambda(l), std::cos(t), std::sin(t)); };
  PeriodicityMismatch r = eval(lambda, theta);
  for (int it = 0; it < max_iter && r.norm() > tol; ++it) {
    const double dl = 1e-7 * (1.0 + std::fabs(lambda));
    const double dt = 1e-7;
    const PeriodicityMismatch rl = eval(lambda + dl, theta);
    const PeriodicityMismatch rt = eval(lambda, theta + dt);
    const double a = (rt.du - r.du) / dt, b = (rl.du - r.du) / dl;
    const double c = (rt.dv - r.dv) / dt, d = (rl.dv - r.dv) / dl;
    const double det = a * d - b * c;
    if (!std::isfinite(det) || det == 0.0) throw OracleFailure("singular eigenvalue refinement");
    const double st = -(d * r.du - b * r.dv) / det;
    const double sl = -(-c * r.du + a * r.dv) / det;
    double alpha = 1.0;
    bool ok = false;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      const PeriodicityMismatch t = eval(lambda + alpha * sl, theta + alpha * st);
      if (std::isfinite(t.norm()) && t.norm() < r.norm()) {
        lambda += alpha * sl;
        theta += alpha * st;
        r = t;
        ok = true;
        break;
      }
    }
    if (!ok) break;
  }
  if (!(r.norm() <= 1e3 * tol)) {
    throw OracleFailure("eigenvalue refinement stalled at mismatch " + std::to_string(r.norm()));
  }
  return {lambda, theta};
}

}  // namespace plap
