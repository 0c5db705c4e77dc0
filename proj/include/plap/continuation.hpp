#pragma once

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "plap/discrete_operator.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/gp_solver.hpp"
#include "plap/linalg.hpp"
#include "plap/nonlinearity.hpp"
#include "plap/problem.hpp"

namespace plap {

struct BranchPoint {
  double lambda = 0.0;
  DiscreteField u;
  double sup_norm = 0.0;
  double w_norm = 0.0;
  double arclength = 0.0;
  int newton_iters = 0;
  double residual = 0.0;  // ||L(u) - lambda m f(u)||_2 / ||L(u)||_2
};

enum class Termination { NormCapReached, LambdaWindowExited, StepFailure, ClosedLoop, MaxPointsReached };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::NormCapReached: return "NormCapReached";
    case Termination::LambdaWindowExited: return "LambdaWindowExited";
    case Termination::StepFailure: return "StepFailure";
    case Termination::ClosedLoop: return "ClosedLoop";
    case Termination::MaxPointsReached: return "MaxPointsReached";
  }
  return "StepFailure";
}

enum class SeedKind { from_zero, from_infinity };

inline const char* seed_name(SeedKind s) { return s == SeedKind::from_zero ? "from-zero" : "from-infinity"; }

struct Branch {
  Sign nu = Sign::plus;
  Sign sigma = Sign::plus;
  SeedKind seed = SeedKind::from_zero;
  std::string seed_description;
  std::vector<BranchPoint> points;
  Termination termination = Termination::StepFailure;
};

struct ContinuationControls {
  double step0 = 0.05;
  double step_min = 1e-6;
  double step_max = 1.0;
  double norm_cap = 50.0;     // stop once sup_norm reaches this value
  double norm_floor = 1.0;    // from-infinity branches stop once sup_norm falls to this value
  double lambda_lo = -100.0;
  double lambda_hi = 100.0;
  int max_points = 2000;
  double newton_tol = 1e-10;  // relative residual
  int max_newton = 12;
  int easy_iterations = 3;
  double epsilon_reg = 1e-10;
  double alpha = 0.0;         // seed amplitude in sup-norm; 0 picks the default
};

/// Discrete residual map (lambda, x) -> L(x) - lambda m g(x) of the branch problem. In the inverted
/// chart x = w = u/||u||^2 and g(w) = ||w||^{2(p-1)} f(w/||w||^2), with ||.|| the W-norm.
class BranchSystem {
 public:
  BranchSystem(ProblemSpec spec, NonlinearitySpec f, bool inverted, double epsilon_reg = 1e-10)
      : spec_(std::move(spec)), f_(std::move(f)), inverted_(inverted), eps_(epsilon_reg) {}

  const ProblemSpec& spec() const noexcept { return spec_; }
  const NonlinearitySpec& nonlinearity() const noexcept { return f_; }
  bool inverted() const noexcept { return inverted_; }

  DiscreteField g(const DiscreteField& x) const {
    DiscreteField out(x.size());
    if (!inverted_) {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = f_(x[i]);
      return out;
    }
    const double n = w_norm(spec_, x);
    if (!(n > 0.0)) throw NumericalError("inverted chart is undefined at w = 0");
    const double scale = std::pow(n, 2.0 * (spec_.p().value() - 1.0));
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * f_(x[i] / (n * n));
    return out;
  }

  DiscreteField residual(double lambda, const DiscreteField& x) const {
    DiscreteField r = apply_operator(spec_, x);
    const DiscreteField gx = g(x);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] -= lambda * spec_.m()[i] * gx[i];
    return r;
  }

  /// Jacobian of the residual in x, with the lambda derivative as the first extra column. The
  /// inverted chart adds a rank-one term a c^T, carried as a second border through z = c^T dx.
  BorderedSystem jacobian(double lambda, const DiscreteField& x) const {
    const auto& m = spec_.m();
    const double p = spec_.p().value();
    BorderedSystem sys;
    sys.a = operator_jacobian(spec_, x, eps_);
    DiscreteField col(x.size());
    if (!inverted_) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        sys.a.diag[i] -= lambda * m[i] * f_.derivative(x[i]);
        col[i] = -m[i] * f_(x[i]);
      }
      sys.cols = {col};
      return sys;
    }
    const double n = w_norm(spec_, x);
    const double h = spec_.grid().spacing();
    const DiscreteField r = apply_operator(spec_, x);
    DiscreteField a(x.size()), c(x.size());
    const double d_scale = std::pow(n, 2.0 * p - 4.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = x[i] / (n * n);
      const double fs = f_(s), dfs = f_.derivative(s);
      sys.a.diag[i] -= lambda * m[i] * d_scale * dfs;
      col[i] = -m[i] * std::pow(n, 2.0 * (p - 1.0)) * fs;
      a[i] = -lambda * m[i] *
             (2.0 * (p - 1.0) * std::pow(n, 2.0 * p - 3.0) * fs - 2.0 * std::pow(n, 2.0 * p - 5.0) * dfs * x[i]);
      c[i] = std::pow(n, 1.0 - p) * h * r[i];
    }
    sys.cols = {col, a};
    sys.rows = {DiscreteField(x.size()), c};
    sys.corner = {{0.0, 0.0}, {0.0, -1.0}};
    return sys;
  }

  /// Original variables of a chart point.
  DiscreteField to_original(const DiscreteField& x) const {
    if (!inverted_) return x;
    const double n = w_norm(spec_, x);
    return (1.0 / (n * n)) * x;
  }

  /// Relative residual of (lambda, u) for the original problem.
  double original_residual(double lambda, const DiscreteField& u) const {
    DiscreteField r = apply_operator(spec_, u);
    const double scale = euclidean_norm(r);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] -= lambda * spec_.m()[i] * f_(u[i]);
    return scale > 0.0 ? euclidean_norm(r) / scale : euclidean_norm(r);
  }

  double grid_spacing() const noexcept { return spec_.grid().spacing(); }

 private:
  ProblemSpec spec_;
  NonlinearitySpec f_;
  bool inverted_;
  double eps_;
};

/// Hyperplane h <t_u, x - x_a> + t_lambda (lambda - lambda_a) = ds.
struct Anchor {
  DiscreteField x;
  double lambda = 0.0;
  DiscreteField t_x;
  double t_lambda = 0.0;
  double ds = 0.0;
};

struct ChartPoint {
  double lambda = 0.0;
  DiscreteField x;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline double anchor_value(const BranchSystem& sys, const Anchor& a, double lambda, const DiscreteField& x) {
  return sys.grid_spacing() * (dot(a.t_x, x) - dot(a.t_x, a.x)) + a.t_lambda * (lambda - a.lambda) -
         a.ds;
}

}  // namespace detail

/// Newton on [residual; anchor] from (lambda, x). Throws NoConvergence.
inline ChartPoint corrector(const BranchSystem& sys, const Anchor& anchor, double lambda, DiscreteField x,
                            const ContinuationControls& ctl = {}) {
  const double h = sys.grid_spacing();
  auto measure = [&](double l, const DiscreteField& v, double& rel, double& gval) {
    const DiscreteField r = sys.residual(l, v);
    const double scale = euclidean_norm(apply_operator(sys.spec(), v));
    const double floor = detail::rounding_floor(sys.spec(), v);
    rel = euclidean_norm(r) / std::max(scale, 1e-300);
    gval = detail::anchor_value(sys, anchor, l, v);
    const double ok_r = std::max(ctl.newton_tol, floor / std::max(scale, 1e-300));
    return std::make_pair(r, ok_r);
  };
  const double g_tol = 1e-12 * (1.0 + std::fabs(anchor.ds));
  double rel = 0.0, gval = 0.0;
  auto [r, ok_r] = measure(lambda, x, rel, gval);
  for (int it = 0; it <= ctl.max_newton; ++it) {
    if (!std::isfinite(rel)) break;
    if (rel <= ok_r && std::fabs(gval) <= g_tol) return {lambda, std::move(x), it, rel};
    if (it == ctl.max_newton) break;
    BorderedSystem jac = sys.jacobian(lambda, x);
    const std::size_t k = jac.borders();
    // The anchor row sits in border slot 0 (the lambda column).
    DiscreteField row = h * anchor.t_x;
    if (k == 1) {
      jac.rows = {row};
      jac.corner = {{anchor.t_lambda}};
    } else {
      jac.rows[0] = row;
      jac.corner[0][0] = anchor.t_lambda;
    }
    std::vector<double> rhs_extra(k, 0.0);
    rhs_extra[0] = -gval;
    const BorderedSolution step = solve_bordered(jac, -1.0 * r, rhs_extra);
    const double merit = rel + std::fabs(gval);
    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 8; ++half, t *= 0.5) {
      DiscreteField xn = x + t * step.main;
      const double ln = lambda + t * step.extra[0];
      double rel_n = 0.0, g_n = 0.0;
      auto [rn, okn] = measure(ln, xn, rel_n, g_n);
      if (std::isfinite(rel_n) && (rel_n + std::fabs(g_n) < merit)) {
        x = std::move(xn);
        lambda = ln;
        r = std::move(rn);
        ok_r = okn;
        rel = rel_n;
        gval = g_n;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw NoConvergence("branch corrector did not converge (relative residual " + std::to_string(rel) + ")");
}

/// Pointwise checks on accepted branch points: one sign and no (near) double zero.
inline bool one_signed_with(const DiscreteField& u, Sign sigma) {
  const double s = sign_value(sigma);
  for (double v : u) {
    if (!(s * v > 0.0)) return false;
  }
  return true;
}

inline bool no_double_zero(const DiscreteField& u) {
  double lo = kInfinity();
  for (double v : u) lo = std::min(lo, std::fabs(v));
  return lo > 1e-8 * sup_norm(u);
}

namespace detail {

inline BranchPoint to_branch_point(const BranchSystem& sys, const ChartPoint& c, double arclength) {
  BranchPoint b;
  b.lambda = c.lambda;
  b.u = sys.to_original(c.x);
  b.sup_norm = sup_norm(b.u);
  b.w_norm = w_norm(sys.spec(), b.u);
  b.arclength = arclength;
  b.newton_iters = c.iterations;
  b.residual = sys.original_residual(c.lambda, b.u);
  return b;
}

inline double chart_distance(const BranchSystem& sys, double l1, const DiscreteField& x1, double l2,
                             const DiscreteField& x2) {
  const DiscreteField d = x1 - x2;
  return std::sqrt((l1 - l2) * (l1 - l2) + sys.grid_spacing() * dot(d, d));
}

struct SeedState {
  ChartPoint point;
  DiscreteField direction;  // unit chart tangent pointing into the branch (lambda part zero)
};

// From-zero seed in the chart of `sys`: x = sigma alpha phi0 at lambda0 / g0, corrected with the
// projection onto phi0 held fixed and lambda free.
inline SeedState seed_in_chart(const BranchSystem& sys, const EigenPair& eig, double g0, Sign sigma, double alpha,
                               const ContinuationControls& ctl) {
  if (!(alpha > 0.0)) throw ConfigError("seed amplitude alpha must be positive");
  const double h = sys.grid_spacing();
  DiscreteField phi0 = (1.0 / w_norm(sys.spec(), eig.u)) * eig.u;  // ||phi0|| = 1 in the W-norm
  const double amp = alpha / sup_norm(phi0);
  DiscreteField x = (sign_value(sigma) * amp) * phi0;
  const double lambda = eig.lambda / g0;
  const double tnorm = std::sqrt(h * dot(phi0, phi0));
  Anchor anchor{x, lambda, (sign_value(sigma) / tnorm) * phi0, 0.0, 0.0};
  try {
    ChartPoint c = corrector(sys, anchor, lambda, x, ctl);
    return {std::move(c), anchor.t_x};
  } catch (const NumericalError& e) {
    throw SeedCorrectionFailed(std::string("seed correction failed: ") + e.what());
  }
}

inline bool point_admissible(const BranchPoint& b, Sign sigma) {
  return std::isfinite(b.lambda) && one_signed_with(b.u, sigma) && no_double_zero(b.u);
}

}  // namespace detail

/// Pseudo-arclength continuation from a corrected seed, secant predictor, adaptive step.
inline Branch continue_in_chart(const BranchSystem& sys, const detail::SeedState& seed, Sign nu, Sign sigma,
                                SeedKind kind, const ContinuationControls& ctl) {
  Branch br;
  br.nu = nu;
  br.sigma = sigma;
  br.seed = kind;
  const bool inverted = kind == SeedKind::from_infinity;

  ChartPoint cur = seed.point;
  DiscreteField t_x = seed.direction;
  double t_l = 0.0;
  double arc = 0.0;
  BranchPoint first = detail::to_branch_point(sys, cur, arc);
  if (!detail::point_admissible(first, sigma)) throw SeedCorrectionFailed("corrected seed is not one-signed");
  br.points.push_back(first);
  const ChartPoint origin = cur;

  double ds = ctl.step0;
  while (true) {
    if (static_cast<int>(br.points.size()) >= ctl.max_points) {
      br.termination = Termination::MaxPointsReached;
      break;
    }
    std::optional<ChartPoint> next;
    BranchPoint bp;
    while (ds >= ctl.step_min) {
      Anchor anchor{cur.x, cur.lambda, t_x, t_l, ds};
      DiscreteField guess = cur.x + ds * t_x;
      const double lguess = cur.lambda + ds * t_l;
      try {
        ChartPoint c = corrector(sys, anchor, lguess, std::move(guess), ctl);
        bp = detail::to_branch_point(sys, c, 0.0);
        if (detail::point_admissible(bp, sigma)) {
          next = std::move(c);
          break;
        }
      } catch (const NumericalError&) {
      }
      ds *= 0.5;
    }
    if (!next) {
      br.termination = Termination::StepFailure;
      break;
    }
    const double dist = detail::chart_distance(sys, next->lambda, next->x, cur.lambda, cur.x);
    if (!(dist > 0.0)) {
      br.termination = Termination::StepFailure;
      break;
    }
    t_x = (1.0 / dist) * (next->x - cur.x);
    t_l = (next->lambda - cur.lambda) / dist;
    arc += dist;
    bp.arclength = arc;
    if (bp.lambda < ctl.lambda_lo || bp.lambda > ctl.lambda_hi) {
      br.termination = Termination::LambdaWindowExited;
      break;
    }
    br.points.push_back(bp);
    if (next->iterations <= ctl.easy_iterations) ds = std::min(2.0 * ds, ctl.step_max);
    cur = std::move(*next);
    if (!inverted && bp.sup_norm >= ctl.norm_cap) {
      br.termination = Termination::NormCapReached;
      break;
    }
    if (inverted && bp.sup_norm <= ctl.norm_floor) {
      br.termination = Termination::NormCapReached;
      break;
    }
    if (br.points.size() > 8 &&
        detail::chart_distance(sys, cur.lambda, cur.x, origin.lambda, origin.x) < 0.5 * ds) {
      br.termination = Termination::ClosedLoop;
      break;
    }
  }
  spdlog::debug("branch {} nu={} sigma={}: {} points, {}", seed_name(kind), sign_name(nu), sign_name(sigma),
                br.points.size(), termination_name(br.termination));
  return br;
}

inline double default_seed_alpha(const NonlinearitySpec& f) {
  const double s1 = f.a7_zeros() ? std::min(f.a7_zeros()->s1, -f.a7_zeros()->t1) : 0.0;
  return 0.01 * std::max(1.0, s1);
}

/// Corrected first point of the branch bifurcating from (lambda0^nu / f0, 0).
inline BranchPoint seed_from_zero(const ProblemSpec& spec, const NonlinearitySpec& f, const EigenPair& eig, Sign sigma,
                                  double alpha, const ContinuationControls& ctl = {}) {
  if (!(f.f0() > 0.0) || std::isinf(f.f0())) {
    throw ConfigError("branch from zero needs a finite positive f0 (no finite bifurcation point otherwise)");
  }
  const BranchSystem sys(spec, f, false, ctl.epsilon_reg);
  return detail::to_branch_point(sys, detail::seed_in_chart(sys, eig, f.f0(), sigma, alpha, ctl).point, 0.0);
}

/// Branch of one-sign solutions bifurcating from (lambda0^nu / f0, 0), continued until a stop rule.
inline Branch continue_from_zero(const ProblemSpec& spec, const NonlinearitySpec& f, Sign nu, Sign sigma,
                                 const ContinuationControls& ctl = {}, const EigenOptions& eopts = {}) {
  if (!(f.f0() > 0.0) || std::isinf(f.f0())) {
    throw ConfigError("branch from zero needs a finite positive f0 (no finite bifurcation point otherwise)");
  }
  const EigenPair eig = principal_eigen(spec, nu, eopts);
  const BranchSystem sys(spec, f, false, ctl.epsilon_reg);
  const double alpha = ctl.alpha > 0.0 ? ctl.alpha : default_seed_alpha(f);
  const auto seed = detail::seed_in_chart(sys, eig, f.f0(), sigma, alpha, ctl);
  Branch br = continue_in_chart(sys, seed, nu, sigma, SeedKind::from_zero, ctl);
  br.seed_description = "from-zero at lambda0/f0 = " + std::to_string(eig.lambda / f.f0());
  return br;
}

/// Branch of one-sign solutions coming from (lambda0^nu / finf, infinity), traced in the chart
/// w = u/||u||^2 as a from-zero branch of the transformed problem and mapped back to u.
inline Branch seed_from_infinity(const ProblemSpec& spec, const NonlinearitySpec& f, Sign nu, Sign sigma,
                                 const ContinuationControls& ctl = {}, const EigenOptions& eopts = {}) {
  if (!(f.finf() > 0.0) || std::isinf(f.finf())) {
    throw ConfigError("branch from infinity needs a finite positive finf");
  }
  const EigenPair eig = principal_eigen(spec, nu, eopts);
  const BranchSystem sys(spec, f, true, ctl.epsilon_reg);
  // The chart seed x = alpha phi0/sup(phi0) maps back to sup_norm = sup(phi0)^2/alpha; start near 2 norm_cap.
  DiscreteField phi0 = (1.0 / w_norm(spec, eig.u)) * eig.u;
  const double alpha = ctl.alpha > 0.0 ? ctl.alpha : sup_norm(phi0) * sup_norm(phi0) / (2.0 * ctl.norm_cap);
  const auto seed = detail::seed_in_chart(sys, eig, f.finf(), sigma, alpha, ctl);
  Branch br = continue_in_chart(sys, seed, nu, sigma, SeedKind::from_infinity, ctl);
  br.seed_description = "from-infinity at lambda0/finf = " + std::to_string(eig.lambda / f.finf());
  return br;
}

/// Lambda on the branch where sup_norm first crosses s, by quadratic interpolation in sup_norm.
inline std::optional<double> lambda_at_sup(const Branch& br, double s) {
  const auto& pts = br.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].sup_norm - s, b = pts[i + 1].sup_norm - s;
    if (a == 0.0) return pts[i].lambda;
    if (a * b > 0.0) continue;
    std::size_t j = i + 2 < pts.size() ? i : (i > 0 ? i - 1 : i);
    if (j + 2 >= pts.size()) {
      const double t = a / (a - b);
      return pts[i].lambda + t * (pts[i + 1].lambda - pts[i].lambda);
    }
    const double x0 = pts[j].sup_norm, x1 = pts[j + 1].sup_norm, x2 = pts[j + 2].sup_norm;
    const double y0 = pts[j].lambda, y1 = pts[j + 1].lambda, y2 = pts[j + 2].lambda;
    if (x0 == x1 || x1 == x2 || x0 == x2) {
      const double t = a / (a - b);
      return pts[i].lambda + t * (pts[i + 1].lambda - pts[i].lambda);
    }
    return y0 * (s - x1) * (s - x2) / ((x0 - x1) * (x0 - x2)) + y1 * (s - x0) * (s - x2) / ((x1 - x0) * (x1 - x2)) +
           y2 * (s - x0) * (s - x1) / ((x2 - x0) * (x2 - x1));
  }
  return std::nullopt;
}

/// Limit of lambda as sup_norm -> 0: least-squares line in sup_norm^2 through the k smallest-norm points.
inline double extrapolate_to_zero(const Branch& br, std::size_t k = 3) {
  std::vector<const BranchPoint*> pts;
  for (const auto& p : br.points) pts.push_back(&p);
  std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->sup_norm < b->sup_norm; });
  k = std::min(k, pts.size());
  if (k == 0) throw NumericalError("empty branch");
  if (k == 1) return pts[0]->lambda;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = pts[i]->sup_norm * pts[i]->sup_norm, y = pts[i]->lambda;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kk = static_cast<double>(k);
  const double den = kk * sxx - sx * sx;
  if (den == 0.0) return sy / kk;
  const double slope = (kk * sxy - sx * sy) / den;
  return (sy - slope * sx) / kk;
}

}  // namespace plap
