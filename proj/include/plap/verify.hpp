#pragma once

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "plap/continuation.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/fixtures.hpp"
#include "plap/parallel.hpp"
#include "plap/shooting.hpp"
#include "plap/solution_count.hpp"

namespace plap {

/// Outcome of one property check on one fixture. `passed` depends only on evidence and tolerance.
struct PropertyReport {
  std::string name;
  bool passed = false;
  std::map<std::string, double> evidence;
  double tolerance = 0.0;
  std::string fixture_id;
};

/// Passes iff min u * max u > 0 and min|u|/max|u| > ratio_floor.
inline PropertyReport check_one_signed(const DiscreteField& u, const std::string& fixture_id = "",
                                       double ratio_floor = 0.0) {
  PropertyReport r{"one_signed", false, {}, ratio_floor, fixture_id};
  const double lo = min_value(u), hi = max_value(u);
  double amin = kInfinity();
  for (double v : u) amin = std::min(amin, std::fabs(v));
  const double ratio = amin / sup_norm(u);
  r.evidence = {{"min", lo}, {"max", hi}, {"ratio", ratio}};
  r.passed = lo * hi > 0.0 && ratio > ratio_floor;
  return r;
}

/// Fails iff some node has |u_i| < eps sup|u| and |du_i| < eps sup|du|.
inline PropertyReport check_no_double_zero(const DiscreteField& u, const DiscreteField& du,
                                           const std::string& fixture_id = "", double eps = 1e-6) {
  PropertyReport r{"no_double_zero", true, {}, eps, fixture_id};
  const double su = sup_norm(u), sd = sup_norm(du);
  double worst = kInfinity();
  double flagged = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::fabs(u[i]) / std::max(su, 1e-300);
    const double b = std::fabs(du[i]) / std::max(sd, 1e-300);
    worst = std::min(worst, std::max(a, b));
    if (a < eps && b < eps) flagged += 1.0;
  }
  r.evidence = {{"worst_scaled_max", worst}, {"flagged_nodes", flagged}};
  r.passed = flagged == 0.0;
  return r;
}

/// Scans the open gap (lambda0- + g, lambda0+ - g) with the shooting oracle; passes iff empty.
/// Without a negative principal eigenvalue the window is (lo_default, lambda0+ - g) with
/// g = 0.05 lambda0+.
inline PropertyReport check_nonexistence_gap(const ProblemSpec& spec, const std::string& fixture_id = "",
                                             ScanOptions scan = {}, double lo_default = -1.0) {
  PropertyReport r{"nonexistence_gap", false, {}, scan.accept_tol, fixture_id};
  const double lp = principal_eigen(spec, Sign::plus).lambda;
  std::optional<double> lm;
  if (spec.coeffs().weight_has_negative_part()) lm = principal_eigen(spec, Sign::minus).lambda;
  const double g = lm ? 0.05 * (lp - *lm) : 0.05 * lp;
  const double lo = lm ? *lm + g : lo_default;
  const double hi = lp - g;
  const auto cands = oracle_scan(spec, lo, hi, scan);
  r.evidence = {{"window_lo", lo}, {"window_hi", hi}, {"candidates", static_cast<double>(cands.size())}};
  r.passed = cands.empty();
  return r;
}

/// Same check over an explicit window.
inline PropertyReport check_nonexistence_window(const ProblemSpec& spec, double lo, double hi,
                                                const std::string& fixture_id = "", ScanOptions scan = {}) {
  PropertyReport r{"nonexistence_gap", false, {}, scan.accept_tol, fixture_id};
  const auto cands = oracle_scan(spec, lo, hi, scan);
  r.evidence = {{"window_lo", lo}, {"window_hi", hi}, {"candidates", static_cast<double>(cands.size())}};
  if (!cands.empty()) r.evidence["first_candidate"] = cands.front().lambda;
  r.passed = cands.empty();
  return r;
}

namespace detail {

// Interior zeros of the piecewise linear interpolant (no wrap-around).
inline std::vector<double> interior_zeros(const PeriodicGrid& g, const DiscreteField& u) {
  std::vector<double> z;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double a = u[i], b = u[i + 1];
    if (a == 0.0) {
      if (i > 0) z.push_back(g.node(i));
    } else if (a * b < 0.0) {
      z.push_back(g.node(i) + g.spacing() * a / (a - b));
    }
  }
  return z;
}

}  // namespace detail

/// Sturm comparison for -(phi_p(u'))' = (b_i - q) phi_p(u) with b2 >= b1: between consecutive
/// zeros c < d of u1, u2 vanishes, unless b1 = b2 and u2 is a multiple of u1.
inline PropertyReport check_sturm(const PeriodicGrid& grid, const DiscreteField& b1, const DiscreteField& b2,
                                  const DiscreteField& u1, const DiscreteField& u2,
                                  const std::string& fixture_id = "", double tol = 1e-6) {
  for (const auto* f : {&b1, &b2, &u1, &u2}) require_on_grid(grid, *f, "check_sturm");
  double gap = 0.0, bscale = 0.0;
  for (std::size_t i = 0; i < b1.size(); ++i) {
    if (b2[i] < b1[i]) throw InapplicableFixture("Sturm comparison needs b2 >= b1 pointwise");
    gap = std::max(gap, b2[i] - b1[i]);
    bscale = std::max({bscale, std::fabs(b1[i]), std::fabs(b2[i])});
  }
  const auto zeros = detail::interior_zeros(grid, u1);
  if (zeros.size() < 2) throw InapplicableFixture("u1 has no interior pair of consecutive zeros");

  PropertyReport r{"sturm", false, {}, tol, fixture_id};
  // Multiple clause: least-squares mu and the relative misfit of u2 - mu u1.
  const double mu = dot(u1, u2) / dot(u1, u1);
  const double misfit = sup_distance(u2, mu * u1) / std::max(sup_norm(u2), 1e-300);
  const bool equal_b = gap <= tol * std::max(bscale, 1.0);
  const bool multiple = equal_b && misfit <= tol && mu != 0.0;

  int satisfied = 0;
  const int pairs = static_cast<int>(zeros.size()) - 1;
  for (int k = 0; k < pairs; ++k) {
    const double c = zeros[static_cast<std::size_t>(k)], d = zeros[static_cast<std::size_t>(k) + 1];
    bool hit = false;
    for (double z : detail::interior_zeros(grid, u2)) hit = hit || (z > c && z < d);
    if (hit) ++satisfied;
  }
  r.evidence = {{"zero_pairs", static_cast<double>(pairs)},
                {"pairs_with_u2_zero", static_cast<double>(satisfied)},
                {"b_gap", gap},
                {"multiple_misfit", misfit}};
  r.passed = satisfied == pairs || multiple;
  return r;
}

/// From-zero branches stay in t1 < u < s1; from-infinity branches have max u > s2 or min u < t2.
inline PropertyReport check_confinement(const Branch& br, const A7Zeros& z, const std::string& fixture_id = "") {
  PropertyReport r{"confinement", true, {}, 0.0, fixture_id};
  double worst = kInfinity();
  for (const auto& pt : br.points) {
    const double hi = max_value(pt.u), lo = min_value(pt.u);
    const double margin = br.seed == SeedKind::from_zero ? std::min(z.s1 - hi, lo - z.t1)
                                                         : std::max(hi - z.s2, z.t2 - lo);
    worst = std::min(worst, margin);
  }
  r.evidence = {{"worst_margin", worst}, {"points", static_cast<double>(br.points.size())}};
  r.passed = !br.points.empty() && worst > 0.0;
  return r;
}

struct OracleComparison {
  double lambda_coarse = 0.0;
  double lambda_fine = 0.0;
  double lambda_richardson = 0.0;
  double lambda_oracle = 0.0;
  double error_coarse = 0.0;      // sup |u_N - oracle| / max(1, sup u)
  double error_fine = 0.0;        // same for u_2N on the coarse nodes
  double error_richardson = 0.0;  // same for (4 u_2N - u_N)/3
  double lambda_error = 0.0;      // |lambda_R - lambda_oracle| / |lambda_oracle|
};

/// Compares a grid branch point with the shooting oracle at the same amplitude u(0). The point is
/// recomputed on the doubled grid with u(0) pinned, and both are Richardson-extrapolated.
inline OracleComparison compare_with_oracle(const ProblemSpec& spec, const NonlinearitySpec& f, double lambda,
                                            const DiscreteField& u, int steps_per_node = 64) {
  require_on_grid(spec, u, "compare_with_oracle");
  const ProblemSpec fine = spec.with_grid(spec.grid().refined());
  const BranchSystem sys(fine, f, false);
  Anchor pin;
  pin.x = resample(spec.grid(), u, fine.grid());
  pin.lambda = lambda;
  pin.t_x = DiscreteField(fine.grid().size());
  pin.t_x[0] = 1.0 / fine.grid().spacing();
  ContinuationControls ctl;
  ctl.max_newton = 40;
  const ChartPoint cp = corrector(sys, pin, lambda, pin.x, ctl);

  const std::size_t n = u.size();
  OracleComparison c;
  c.lambda_coarse = lambda;
  c.lambda_fine = cp.lambda;
  c.lambda_richardson = (4.0 * cp.lambda - lambda) / 3.0;
  DiscreteField uf(n), ur(n);
  for (std::size_t i = 0; i < n; ++i) {
    uf[i] = cp.x[2 * i];
    ur[i] = (4.0 * uf[i] - u[i]) / 3.0;
  }
  const int steps = steps_per_node * static_cast<int>(n);
  const IvpSetup setup = IvpSetup::nonlinear_form(spec, [&f](double s) { return f(s); }, c.lambda_richardson, steps);
  const DiscreteField d = centered_difference(spec.grid(), ur);
  const std::size_t segments = n % 16 == 0 ? 16 : 1;
  std::vector<double> us(segments), vs(segments);
  for (std::size_t k = 0; k < segments; ++k) {
    const std::size_t i = k * (n / segments);
    us[k] = k == 0 ? u[0] : ur[i];
    vs[k] = phi_p(spec.p(), d[i]);
  }
  FindOptions fo;
  fo.tol = 1e-11;
  auto orbit = shoot_pinned(setup, us, vs, c.lambda_richardson, fo);
  if (!orbit) throw OracleFailure("shooting oracle did not close the orbit");
  c.lambda_oracle = orbit->lambda;
  const DiscreteField v = sample_pinned(setup, *orbit, spec.grid());
  const double scale = std::max(1.0, sup_norm(v));
  c.error_coarse = sup_distance(u, v) / scale;
  c.error_fine = sup_distance(uf, v) / scale;
  c.error_richardson = sup_distance(ur, v) / scale;
  c.lambda_error = std::fabs(c.lambda_richardson - orbit->lambda) / std::fabs(orbit->lambda);
  return c;
}

/// Shared, lazily computed fixtures for the property suite.
class SuiteContext {
 public:
  explicit SuiteContext(std::uint64_t seed = 1, int jobs = 1) : seed_(seed), jobs_(jobs) {}

  std::uint64_t seed() const noexcept { return seed_; }
  int jobs() const noexcept { return jobs_; }

  const EigenPair& eigen(const std::string& id, const ProblemSpec& spec, Sign nu) {
    return memo<EigenPair>(eigen_cache_, id + sign_name(nu), [&] { return principal_eigen(spec, nu); });
  }

  /// Branches of the cosine fixture (p = 2, N = 256) keyed by nonlinearity, seed and signs.
  const Branch& branch(const std::string& family, SeedKind kind, Sign nu, Sign sigma) {
    const std::string key = family + "/" + seed_name(kind) + "/" + sign_name(nu) + sign_name(sigma);
    return memo<Branch>(branch_cache_, key, [&] {
      const ProblemSpec spec = fixtures::cosine(2.0, 256);
      const NonlinearitySpec f = nonlinearity(family, spec);
      ContinuationControls c = controls(family, kind);
      return kind == SeedKind::from_zero ? continue_from_zero(spec, f, nu, sigma, c)
                                         : seed_from_infinity(spec, f, nu, sigma, c);
    });
  }

  static NonlinearitySpec nonlinearity(const std::string& family, const ProblemSpec& spec) {
    if (family == "rational") return fixtures::rational(spec);
    if (family == "a7") return fixtures::a7(spec);
    if (family == "phi_p") return NonlinearitySpec::phi(spec.p());
    if (family == "superlinear") return fixtures::superlinear(spec);
    throw ConfigError("no branch fixture for family " + family);
  }

  static ContinuationControls controls(const std::string& family, SeedKind kind) {
    ContinuationControls c;
    c.lambda_lo = -10.0;
    c.lambda_hi = 10.0;
    if (family == "superlinear") c.norm_cap = 5.0;
    if (family == "phi_p") c.norm_cap = 10.0;
    if (kind == SeedKind::from_infinity) {
      c.step0 = 0.002;
      c.step_max = 0.01;
      c.norm_floor = family == "a7" ? 0.5 : 5.0;
    }
    return c;
  }

 private:
  template <typename T>
  const T& memo(std::map<std::string, std::optional<T>>& cache, const std::string& key,
                const std::function<T()>& make) {
    std::mutex* m;
    {
      std::lock_guard lock(mutex_);
      m = &key_mutex_[key];
    }
    std::lock_guard key_lock(*m);
    {
      std::lock_guard lock(mutex_);
      auto it = cache.find(key);
      if (it != cache.end() && it->second) return *it->second;
    }
    T value = make();
    std::lock_guard lock(mutex_);
    auto& slot = cache[key];
    slot = std::move(value);
    return *slot;
  }

  std::uint64_t seed_;
  int jobs_;
  std::mutex mutex_;
  std::map<std::string, std::mutex> key_mutex_;
  std::map<std::string, std::optional<EigenPair>> eigen_cache_;
  std::map<std::string, std::optional<Branch>> branch_cache_;
};

struct CheckEntry {
  std::string name;
  std::string description;
  std::function<std::vector<PropertyReport>(SuiteContext&)> run;
  bool negative_control = false;
};

namespace detail {

inline PropertyReport named(PropertyReport r, const std::string& name) {
  r.name = name;
  return r;
}

inline PropertyReport make_report(const std::string& name, const std::string& fixture, double tol,
                                  std::map<std::string, double> evidence, bool passed) {
  return {name, passed, std::move(evidence), tol, fixture};
}

inline std::vector<std::pair<std::string, Branch const*>> all_branches(SuiteContext& ctx) {
  std::vector<std::pair<std::string, Branch const*>> out;
  for (const char* fam : {"rational", "a7", "phi_p"}) {
    for (Sign sigma : {Sign::plus, Sign::minus}) {
      for (SeedKind k : {SeedKind::from_zero, SeedKind::from_infinity}) {
        const std::string id = std::string(fam) + "/" + seed_name(k) + "/nu+" + "/sigma" + sign_name(sigma);
        out.emplace_back(id, &ctx.branch(fam, k, Sign::plus, sigma));
      }
    }
  }
  out.emplace_back("rational/from-zero/nu-/sigma+", &ctx.branch("rational", SeedKind::from_zero, Sign::minus, Sign::plus));
  return out;
}

inline DiscreteField random_positive_profile(const PeriodicGrid& g, std::mt19937_64& rng) {
  return random_profile(g, rng);
}

inline std::vector<double> p_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(lo + step * i);
  return out;
}

inline double max_adjacent_jump(const std::vector<PSweepRow>& rows) {
  double j = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) j = std::max(j, std::fabs(*rows[i].lambda_plus - *rows[i - 1].lambda_plus));
  return j;
}

inline std::vector<double> sqrt_lambdas() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(0.2 * std::pow(25.0, i / 9.0));
  return out;
}

inline DiscreteField with_flat_zero(const PeriodicGrid& g) {
  return DiscreteField::sample(g, [](double x) { return (1.0 - std::cos(x)) * (1.0 - std::cos(x)); });
}

}  // namespace detail

/// Built-in property checks in suite order. Negative controls are synthetic fixtures that must fail;
/// each has a companion "<name>.can_fail" entry in the default suite that passes iff it fails.
inline std::vector<CheckEntry> check_registry() {
  using detail::make_report;
  std::vector<CheckEntry> reg;

  reg.push_back({"eigen.residual", "principal pairs satisfy the discrete eigen-equation and normalization",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   for (const auto& fx : fixtures::eigen_fixtures()) {
                     for (Sign nu : {Sign::plus, Sign::minus}) {
                       if (nu == Sign::minus && !fx.spec.coeffs().weight_has_negative_part()) continue;
                       const EigenPair& e = ctx.eigen(fx.id, fx.spec, nu);
                       out.push_back(make_report(
                           "eigen.residual", fx.id + "/nu" + sign_name(nu), 1e-8,
                           {{"lambda", e.lambda}, {"relative_residual", e.relative_residual},
                            {"normalization_error", e.normalization_error}},
                           e.relative_residual <= 1e-8 && e.normalization_error <= 1e-10));
                     }
                   }
                   return out;
                 }});

  reg.push_back({"eigen.ordering", "lambda0- < 0 < lambda0+; no negative eigenvalue when m >= 0",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   for (const auto& fx : fixtures::eigen_fixtures()) {
                     const double lp = ctx.eigen(fx.id, fx.spec, Sign::plus).lambda;
                     if (fx.spec.coeffs().sign_changing()) {
                       const double lm = ctx.eigen(fx.id, fx.spec, Sign::minus).lambda;
                       out.push_back(make_report("eigen.ordering", fx.id, 0.0,
                                                 {{"lambda_minus", lm}, {"lambda_plus", lp}}, lm < 0.0 && lp > 0.0));
                     } else {
                       bool infeasible = false;
                       try {
                         principal_eigen(fx.spec, Sign::minus);
                       } catch (const InfeasibleConstraint&) {
                         infeasible = true;
                       }
                       out.push_back(make_report("eigen.ordering", fx.id, 0.0,
                                                 {{"lambda_plus", lp}, {"minus_infeasible", infeasible ? 1.0 : 0.0}},
                                                 lp > 0.0 && infeasible));
                     }
                   }
                   return out;
                 }});

  reg.push_back({"eigen.one_signed", "principal eigenfunctions have one sign with min/max ratio above 1e-3",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   for (const auto& fx : fixtures::eigen_fixtures()) {
                     for (Sign nu : {Sign::plus, Sign::minus}) {
                       if (nu == Sign::minus && !fx.spec.coeffs().weight_has_negative_part()) continue;
                       out.push_back(detail::named(
                           check_one_signed(ctx.eigen(fx.id, fx.spec, nu).u, fx.id + "/nu" + sign_name(nu), 1e-3),
                           "eigen.one_signed"));
                     }
                   }
                   return out;
                 }});

  reg.push_back({"eigen.simplicity", "runs from independent random positive seeds agree to 1e-6",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   std::mt19937_64 rng(ctx.seed());
                   for (const auto& fx : fixtures::eigen_fixtures()) {
                     const DiscreteField s1 = detail::random_positive_profile(fx.spec.grid(), rng);
                     const DiscreteField s2 = detail::random_positive_profile(fx.spec.grid(), rng);
                     const EigenPair a = principal_eigen(fx.spec, Sign::plus, {}, &s1);
                     const EigenPair b = principal_eigen(fx.spec, Sign::plus, {}, &s2);
                     const double d = sup_distance(a.u, b.u) / sup_norm(a.u);
                     out.push_back(make_report("eigen.simplicity", fx.id, 1e-6,
                                               {{"relative_sup_distance", d},
                                                {"lambda_difference", std::fabs(a.lambda - b.lambda)}},
                                               d <= 1e-6));
                   }
                   return out;
                 }});

  reg.push_back({"eigen.variational_bound", "Rayleigh quotients of random trials never undercut lambda0+",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   std::mt19937_64 rng(ctx.seed() + 1);
                   std::normal_distribution<double> gauss(0.0, 1.0);
                   for (const auto& fx : fixtures::eigen_fixtures()) {
                     const double lp = ctx.eigen(fx.id, fx.spec, Sign::plus).lambda;
                     std::optional<double> lm;
                     if (fx.spec.coeffs().weight_has_negative_part()) lm = ctx.eigen(fx.id, fx.spec, Sign::minus).lambda;
                     double worst = kInfinity();
                     int trials = 0;
                     for (int t = 0; t < 40; ++t) {
                       DiscreteField v = detail::random_positive_profile(fx.spec.grid(), rng);
                       if (t % 2 == 1) {
                         for (double& x : v) x += 0.3 * gauss(rng);
                       }
                       const double w = weight_integral(fx.spec, v);
                       if (std::fabs(w) <= 1e-8 * p_energy(fx.spec, v)) continue;
                       const double r = rayleigh(fx.spec, v);
                       if (w > 0.0) {
                         worst = std::min(worst, r - lp);
                       } else if (lm) {
                         worst = std::min(worst, *lm - r);
                       }
                       ++trials;
                     }
                     out.push_back(make_report("eigen.variational_bound", fx.id, 1e-8,
                                               {{"min_margin", worst}, {"trials", static_cast<double>(trials)}},
                                               worst >= -1e-8));
                   }
                   return out;
                 }});

  reg.push_back({"eigen.nonexistence_gap", "no eigenvalue strictly between the principal eigenvalues",
                 [](SuiteContext& ctx) {
                   ScanOptions scan;
                   scan.resolution = 101;
                   scan.jobs = ctx.jobs();
                   std::vector<PropertyReport> out;
                   out.push_back(detail::named(check_nonexistence_gap(fixtures::cosine(2.0, 256), "cosine_p2", scan),
                                               "eigen.nonexistence_gap"));
                   scan.steps = 16384;
                   out.push_back(detail::named(check_nonexistence_gap(fixtures::cosine(3.0, 256), "cosine_p3", scan),
                                               "eigen.nonexistence_gap"));
                   scan.steps = 4096;
                   out.push_back(detail::named(check_nonexistence_gap(fixtures::fourier(2.0, 256), "fourier_p2", scan),
                                               "eigen.nonexistence_gap"));
                   return out;
                 }});

  reg.push_back({"eigen.isolation", "scan finds the principal eigenvalues and nothing between them",
                 [](SuiteContext& ctx) {
                   ScanOptions scan;
                   scan.jobs = ctx.jobs();
                   std::vector<PropertyReport> out;
                   auto one = [&](const std::string& id, const ProblemSpec& spec, double lo, double hi) {
                     const IsolationReport rep = spectrum_scan(spec, lo, hi, scan);
                     std::map<std::string, double> ev{{"candidates", static_cast<double>(rep.findings.size())}};
                     if (rep.delta_plus) ev["delta_plus"] = *rep.delta_plus;
                     if (rep.delta_minus) ev["delta_minus"] = *rep.delta_minus;
                     if (rep.lambda0_plus) ev["lambda0_plus"] = *rep.lambda0_plus;
                     if (rep.lambda0_minus) ev["lambda0_minus"] = *rep.lambda0_minus;
                     out.push_back(make_report("eigen.isolation", id, rep.match_tol, ev, rep.passed));
                   };
                   const ProblemSpec c = fixtures::cosine(2.0, 256);
                   const double lp = ctx.eigen("cosine_p2", c, Sign::plus).lambda;
                   one("cosine_p2", c, -lp - 0.5, lp + 0.5);
                   one("fourier_p2", fixtures::fourier(2.0, 256), 0.5, 4.5);
                   return out;
                 }});

  reg.push_back({"eigen.nonprincipal_sign_change", "non-principal scan eigenfunctions change sign at least twice",
                 [](SuiteContext& ctx) {
                   ScanOptions scan;
                   scan.jobs = ctx.jobs();
                   std::vector<PropertyReport> out;
                   auto one = [&](const std::string& id, const ProblemSpec& spec, double lo, double hi) {
                     const IsolationReport rep = spectrum_scan(spec, lo, hi, scan);
                     int count = 0, min_changes = 1000;
                     for (const auto& f : rep.findings) {
                       if (f.principal) continue;
                       ++count;
                       min_changes = std::min(min_changes, f.candidate.sign_changes);
                     }
                     out.push_back(make_report("eigen.nonprincipal_sign_change", id, 2.0,
                                               {{"nonprincipal_candidates", static_cast<double>(count)},
                                                {"min_sign_changes", count > 0 ? min_changes : 0.0}},
                                               count > 0 && min_changes >= 2));
                   };
                   one("fourier_p2", fixtures::fourier(2.0, 256), 0.5, 5.5);
                   one("cosine_p2", fixtures::cosine(2.0, 256), -8.0, 8.0);
                   return out;
                 }});

  reg.push_back({"oracle.eigen_agreement", "refined grid eigenvalues match the shooting oracle to 1e-6",
                 [](SuiteContext&) {
                   std::vector<PropertyReport> out;
                   for (double p : {2.0, 1.5, 3.0}) {
                     const ProblemSpec spec = fixtures::cosine(p, 256);
                     for (Sign nu : {Sign::plus, Sign::minus}) {
                       const EigenPair e = principal_eigen(spec, nu);
                       const double rich = richardson_eigenvalue(spec, nu);
                       const IvpSetup setup = IvpSetup::eigen_form(spec, e.lambda, p == 2.0 ? 8192 : 65536);
                       const AngleSearch a = minimize_over_angle(setup);
                       const double oracle = refine_eigenvalue(setup, e.lambda, a.theta).first;
                       const std::string id = "cosine_p" + std::string(p == 2.0 ? "2" : (p == 1.5 ? "1.5" : "3")) +
                                              "/nu" + sign_name(nu);
                       out.push_back(make_report("oracle.eigen_agreement", id, 1e-6,
                                                 {{"grid_richardson", rich}, {"oracle", oracle},
                                                  {"difference", std::fabs(rich - oracle)}},
                                                 std::fabs(rich - oracle) <= 1e-6));
                     }
                   }
                   return out;
                 }});

  reg.push_back({"oracle.mismatch_reconstruction",
                 "oracle mismatch from grid eigenpairs, refined by extrapolation, is below 1e-4",
                 [](SuiteContext&) {
                   std::vector<PropertyReport> out;
                   for (const auto& fx : fixtures::eigen_fixtures()) {
                     for (Sign nu : {Sign::plus, Sign::minus}) {
                       if (nu == Sign::minus && !fx.spec.coeffs().weight_has_negative_part()) continue;
                       const ProblemSpec fine = fx.spec.with_grid(fx.spec.grid().refined());
                       const EigenPair a = principal_eigen(fx.spec, nu);
                       const EigenPair b = principal_eigen(fine, nu);
                       const double lam = (4.0 * b.lambda - a.lambda) / 3.0;
                       const double u0 = (4.0 * b.u[0] - a.u[0]) / 3.0;
                       const double da = centered_difference(fx.spec.grid(), a.u)[0];
                       const double db = centered_difference(fine.grid(), b.u)[0];
                       const double v0 = phi_p(fx.spec.p(), (4.0 * db - da) / 3.0);
                       const int steps = fx.spec.p().value() == 2.0 ? 8192 : 65536;
                       const PeriodicityMismatch mm = mismatch(IvpSetup::eigen_form(fx.spec, lam, steps), u0, v0);
                       const double rel = mm.norm() / (std::fabs(u0) + std::fabs(v0));
                       out.push_back(make_report("oracle.mismatch_reconstruction", fx.id + "/nu" + sign_name(nu), 1e-4,
                                                 {{"relative_mismatch", rel}, {"lambda", lam}}, rel <= 1e-4));
                     }
                   }
                   return out;
                 }});

  reg.push_back({"eigen.p_continuity", "max adjacent jump of lambda0+(p) shrinks by >= 1.8 when the p-grid is halved",
                 [](SuiteContext&) {
                   const ProblemSpec base = fixtures::cosine(2.0, 256);
                   const double coarse = detail::max_adjacent_jump(p_sweep(base, detail::p_grid(1.5, 3.0, 0.05)));
                   const double fine = detail::max_adjacent_jump(p_sweep(base, detail::p_grid(1.5, 3.0, 0.025)));
                   return std::vector<PropertyReport>{make_report(
                       "eigen.p_continuity", "cosine_p2", 1.8,
                       {{"jump_coarse", coarse}, {"jump_fine", fine}, {"ratio", coarse / fine}}, coarse / fine >= 1.8)};
                 }});

  reg.push_back({"branch.vertical", "for f = phi_p the branch stays at lambda0 within 1e-6",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   const double l0 = ctx.eigen("cosine_p2", fixtures::cosine(2.0, 256), Sign::plus).lambda;
                   for (SeedKind k : {SeedKind::from_zero, SeedKind::from_infinity}) {
                     const Branch& br = ctx.branch("phi_p", k, Sign::plus, Sign::plus);
                     double dev = 0.0;
                     for (const auto& pt : br.points) dev = std::max(dev, std::fabs(pt.lambda - l0));
                     out.push_back(make_report("branch.vertical", std::string("phi_p/") + seed_name(k), 1e-6,
                                               {{"max_lambda_deviation", dev},
                                                {"points", static_cast<double>(br.points.size())}},
                                               br.points.size() > 2 && dev <= 1e-6));
                   }
                   return out;
                 }});

  reg.push_back({"branch.bifurcation_point", "from-zero branch extrapolates to lambda0/f0 within 1e-3 relative",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   const ProblemSpec spec = fixtures::cosine(2.0, 256);
                   for (Sign nu : {Sign::plus, Sign::minus}) {
                     const double target = ctx.eigen("cosine_p2", spec, nu).lambda / 1.0;
                     const Branch& br = ctx.branch("rational", SeedKind::from_zero, nu, Sign::plus);
                     const double ext = extrapolate_to_zero(br);
                     const double rel = std::fabs(ext - target) / std::fabs(target);
                     out.push_back(make_report("branch.bifurcation_point", std::string("rational/nu") + sign_name(nu),
                                               1e-3, {{"extrapolated", ext}, {"target", target}, {"relative_error", rel}},
                                               rel <= 1e-3));
                   }
                   return out;
                 }});

  reg.push_back({"branch.asymptote", "at sup_norm 50 the branch lambda is within 2e-2 of lambda0/finf",
                 [](SuiteContext& ctx) {
                   const double target = ctx.eigen("cosine_p2", fixtures::cosine(2.0, 256), Sign::plus).lambda / 2.0;
                   const Branch& br = ctx.branch("rational", SeedKind::from_zero, Sign::plus, Sign::plus);
                   const auto l = lambda_at_sup(br, 50.0);
                   const double rel = l ? std::fabs(*l - target) / target : kInfinity();
                   return std::vector<PropertyReport>{make_report(
                       "branch.asymptote", "rational/nu+", 2e-2,
                       {{"lambda_at_50", l.value_or(kInfinity())}, {"target", target}, {"relative_error", rel}},
                       rel <= 2e-2)};
                 }});

  reg.push_back({"branch.from_infinity_consistency",
                 "inverted-chart branch agrees with the from-zero tail to 1e-3 at sup norms 10..50",
                 [](SuiteContext& ctx) {
                   const Branch& z = ctx.branch("rational", SeedKind::from_zero, Sign::plus, Sign::plus);
                   const Branch& w = ctx.branch("rational", SeedKind::from_infinity, Sign::plus, Sign::plus);
                   double worst = 0.0;
                   int matched = 0;
                   for (double s = 10.0; s <= 50.0; s += 5.0) {
                     const auto a = lambda_at_sup(z, s), b = lambda_at_sup(w, s);
                     if (!a || !b) {
                       worst = kInfinity();
                       continue;
                     }
                     ++matched;
                     worst = std::max(worst, std::fabs(*a - *b));
                   }
                   return std::vector<PropertyReport>{make_report(
                       "branch.from_infinity_consistency", "rational/nu+/sigma+", 1e-3,
                       {{"max_lambda_difference", worst}, {"matched_norms", static_cast<double>(matched)}},
                       worst <= 1e-3)};
                 }});

  reg.push_back({"branch.one_signed", "every branch point has the branch sign at every node",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   for (const auto& [id, br] : detail::all_branches(ctx)) {
                     int bad = 0;
                     for (const auto& pt : br->points) bad += one_signed_with(pt.u, br->sigma) ? 0 : 1;
                     out.push_back(make_report("branch.one_signed", id, 0.0,
                                               {{"points", static_cast<double>(br->points.size())},
                                                {"violations", static_cast<double>(bad)}},
                                               !br->points.empty() && bad == 0));
                   }
                   return out;
                 }});

  reg.push_back({"branch.no_double_zero", "no accepted branch point has a double zero",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   const PeriodicGrid g = fixtures::cosine(2.0, 256).grid();
                   for (const auto& [id, br] : detail::all_branches(ctx)) {
                     double flagged = 0.0, worst = kInfinity();
                     for (const auto& pt : br->points) {
                       const PropertyReport r = check_no_double_zero(pt.u, centered_difference(g, pt.u));
                       flagged += r.evidence.at("flagged_nodes");
                       worst = std::min(worst, r.evidence.at("worst_scaled_max"));
                     }
                     out.push_back(make_report("branch.no_double_zero", id, 1e-6,
                                               {{"flagged_nodes", flagged}, {"worst_scaled_max", worst}},
                                               flagged == 0.0));
                   }
                   return out;
                 }});

  reg.push_back({"branch.lambda_zero_exclusion", "no nontrivial branch point sits at |lambda| <= 1e-6",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   for (const auto& [id, br] : detail::all_branches(ctx)) {
                     double lo = kInfinity();
                     for (const auto& pt : br->points) lo = std::min(lo, std::fabs(pt.lambda));
                     out.push_back(make_report("branch.lambda_zero_exclusion", id, 1e-6, {{"min_abs_lambda", lo}},
                                               lo > 1e-6));
                   }
                   return out;
                 }});

  reg.push_back({"branch.confinement", "zero-pattern branches stay inside (t1, s1) or beyond s2 / t2",
                 [](SuiteContext& ctx) {
                   std::vector<PropertyReport> out;
                   const A7Zeros z{-2.0, -1.0, 1.0, 2.0};
                   for (SeedKind k : {SeedKind::from_zero, SeedKind::from_infinity}) {
                     for (Sign sigma : {Sign::plus, Sign::minus}) {
                       const std::string id = std::string("a7/") + seed_name(k) + "/sigma" + sign_name(sigma);
                       out.push_back(detail::named(check_confinement(ctx.branch("a7", k, Sign::plus, sigma), z, id),
                                                   "branch.confinement"));
                     }
                   }
                   return out;
                 }});

  reg.push_back({"count.multiplicity", "at lambda = 1.5 lambda0+/finf there are at least four one-sign solutions",
                 [](SuiteContext& ctx) {
                   const ProblemSpec spec = fixtures::cosine(2.0, 256);
                   const NonlinearitySpec f = fixtures::a7(spec);
                   const double lam = 1.5 * ctx.eigen("cosine_p2", spec, Sign::plus).lambda / f.finf();
                   CountOptions opts;
                   opts.n_starts = 40;
                   opts.rng_seed = ctx.seed();
                   opts.jobs = ctx.jobs();
                   const auto sols = count_solutions(spec, f, lam, opts);
                   int pos = 0, neg = 0;
                   for (const auto& s : sols) (s.sigma == Sign::plus ? pos : neg)++;
                   return std::vector<PropertyReport>{make_report(
                       "count.multiplicity", "a7/cosine_p2", 4.0,
                       {{"lambda", lam}, {"positive", static_cast<double>(pos)}, {"negative", static_cast<double>(neg)}},
                       pos >= 2 && neg >= 2)};
                 }});

  reg.push_back({"count.uniqueness", "sublinear fixture has exactly one positive solution for each lambda",
                 [](SuiteContext& ctx) {
                   const ProblemSpec spec = fixtures::cosine(2.0, 256);
                   const NonlinearitySpec f = fixtures::square_root(spec);
                   std::vector<PropertyReport> out;
                   for (double lam : detail::sqrt_lambdas()) {
                     CountOptions opts;
                     opts.n_starts = 20;
                     opts.rng_seed = ctx.seed();
                     opts.signs = SignFilter::positive;
                     opts.dedup_tol = 1e-6;
                     opts.jobs = ctx.jobs();
                     const auto sols = count_solutions(spec, f, lam, opts);
                     char id[64];
                     std::snprintf(id, sizeof id, "sqrt/lambda=%.6g", lam);
                     out.push_back(make_report("count.uniqueness", id, 1e-6,
                                               {{"lambda", lam}, {"positive_solutions", static_cast<double>(sols.size())}},
                                               sols.size() == 1));
                   }
                   return out;
                 }});

  reg.push_back({"count.lambda_continuity", "||u(lambda + delta) - u(lambda)|| halves (+-30%) when delta halves",
                 [](SuiteContext& ctx) {
                   const ProblemSpec spec = fixtures::cosine(2.0, 256);
                   const NonlinearitySpec f = fixtures::square_root(spec);
                   std::vector<PropertyReport> out;
                   auto solve = [&](double lam) {
                     CountOptions opts;
                     opts.n_starts = 6;
                     opts.rng_seed = ctx.seed();
                     opts.signs = SignFilter::positive;
                     const auto sols = count_solutions(spec, f, lam, opts);
                     if (sols.size() != 1) throw NumericalError("expected a unique positive solution");
                     return sols.front().u;
                   };
                   for (double lam : {0.5, 1.0, 2.0}) {
                     const double delta = 0.1 * lam;
                     const DiscreteField u0 = solve(lam), u1 = solve(lam + delta), u2 = solve(lam + 0.5 * delta);
                     const double ratio = sup_distance(u1, u0) / sup_distance(u2, u0);
                     char id[64];
                     std::snprintf(id, sizeof id, "sqrt/lambda=%.6g", lam);
                     out.push_back(make_report("count.lambda_continuity", id, 0.3, {{"ratio", ratio}},
                                               std::fabs(ratio / 2.0 - 1.0) <= 0.3));
                   }
                   return out;
                 }});

  reg.push_back({"branch.cutoff_consistency", "cut-off branches f_n match the branch for f within 1e-3 (sup <= 5)",
                 [](SuiteContext& ctx) {
                   const ProblemSpec spec = fixtures::cosine(2.0, 256);
                   const Branch& ref = ctx.branch("superlinear", SeedKind::from_zero, Sign::plus, Sign::plus);
                   std::vector<PropertyReport> out;
                   for (double n : {10.0, 20.0, 40.0}) {
                     const NonlinearitySpec fn = fixtures::superlinear(spec).with_cutoff(Cutoff::f_lower_n, n);
                     const Branch br = continue_from_zero(spec, fn, Sign::plus, Sign::plus,
                                                          SuiteContext::controls("superlinear", SeedKind::from_zero));
                     double worst = 0.0;
                     for (double s = 0.5; s <= 5.0; s += 0.5) {
                       const auto a = lambda_at_sup(ref, s), b = lambda_at_sup(br, s);
                       worst = std::max(worst, a && b ? std::fabs(*a - *b) : kInfinity());
                     }
                     char id[64];
                     std::snprintf(id, sizeof id, "superlinear/n=%g", n);
                     out.push_back(make_report("branch.cutoff_consistency", id, 1e-3, {{"max_lambda_difference", worst}},
                                               worst <= 1e-3));
                   }
                   return out;
                 }});

  reg.push_back({"oracle.branch_agreement", "shooting reproduces random branch points to 1e-4 after refinement",
                 [](SuiteContext& ctx) {
                   const ProblemSpec spec = fixtures::cosine(2.0, 256);
                   std::vector<PropertyReport> out;
                   std::mt19937_64 rng(ctx.seed() + 2);
                   for (const char* fam : {"rational", "a7"}) {
                     const Branch& br = ctx.branch(fam, SeedKind::from_zero, Sign::plus, Sign::plus);
                     const NonlinearitySpec f = SuiteContext::nonlinearity(fam, spec);
                     std::vector<std::size_t> idx(br.points.size() - 1);
                     std::iota(idx.begin(), idx.end(), std::size_t{1});
                     std::shuffle(idx.begin(), idx.end(), rng);
                     idx.resize(std::min<std::size_t>(5, idx.size()));
                     for (const std::size_t i : idx) {
                       const BranchPoint& pt = br.points[i];
                       const OracleComparison c = compare_with_oracle(spec, f, pt.lambda, pt.u);
                       out.push_back(make_report("oracle.branch_agreement",
                                                 std::string(fam) + "/point" + std::to_string(i), 1e-4,
                                                 {{"lambda", pt.lambda}, {"sup_norm", pt.sup_norm},
                                                  {"profile_error", c.error_richardson},
                                                  {"lambda_error", c.lambda_error},
                                                  {"profile_error_coarse", c.error_coarse}},
                                                 c.error_richardson <= 1e-4 && c.lambda_error <= 1e-4));
                     }
                   }
                   return out;
                 }});

  reg.push_back({"sturm.comparison", "between consecutive zeros of u1 the comparison solution u2 vanishes",
                 [](SuiteContext&) {
                   const PeriodicGrid g(fixtures::kTwoPi, 512);
                   const DiscreteField one(g.size(), 1.0), four(g.size(), 4.0);
                   const DiscreteField u1 = DiscreteField::sample(g, [](double x) { return std::sin(x + 0.1); });
                   const DiscreteField u2 = DiscreteField::sample(g, [](double x) { return std::sin(2.0 * x + 0.3); });
                   std::vector<PropertyReport> out;
                   out.push_back(detail::named(check_sturm(g, one, four, u1, u2, "sin_b1=1_b2=4"), "sturm.comparison"));
                   out.push_back(detail::named(check_sturm(g, one, one, u1, 3.0 * u1, "sin_equal_b_multiple"),
                                               "sturm.comparison"));
                   return out;
                 }});

  // Negative controls: synthetic fixtures each check must reject.
  reg.push_back({"negative.one_signed", "cos x is not one-signed",
                 [](SuiteContext&) {
                   const PeriodicGrid g(fixtures::kTwoPi, 256);
                   return std::vector<PropertyReport>{detail::named(
                       check_one_signed(DiscreteField::sample(g, [](double x) { return std::cos(x); }), "cos"),
                       "negative.one_signed")};
                 },
                 true});
  reg.push_back({"negative.no_double_zero", "(1 - cos x)^2 has a double zero at 0",
                 [](SuiteContext&) {
                   const PeriodicGrid g(fixtures::kTwoPi, 256);
                   const DiscreteField u = detail::with_flat_zero(g);
                   return std::vector<PropertyReport>{detail::named(
                       check_no_double_zero(u, centered_difference(g, u), "flat_zero"), "negative.no_double_zero")};
                 },
                 true});
  reg.push_back({"negative.nonexistence_gap", "a window containing lambda0+ reports the candidate",
                 [](SuiteContext& ctx) {
                   const ProblemSpec spec = fixtures::cosine(2.0, 256);
                   const double lp = ctx.eigen("cosine_p2", spec, Sign::plus).lambda;
                   ScanOptions scan;
                   scan.resolution = 51;
                   scan.jobs = ctx.jobs();
                   return std::vector<PropertyReport>{detail::named(
                       check_nonexistence_window(spec, 0.0, lp + 0.3, "cosine_p2/window_with_lambda0", scan),
                       "negative.nonexistence_gap")};
                 },
                 true});
  reg.push_back({"negative.sturm", "a zero-free u2 violates the comparison",
                 [](SuiteContext&) {
                   const PeriodicGrid g(fixtures::kTwoPi, 512);
                   const DiscreteField one(g.size(), 1.0), four(g.size(), 4.0);
                   const DiscreteField u1 = DiscreteField::sample(g, [](double x) { return std::sin(x + 0.1); });
                   const DiscreteField u2 = DiscreteField::sample(g, [](double x) { return 1.5 + std::cos(x); });
                   return std::vector<PropertyReport>{
                       detail::named(check_sturm(g, one, four, u1, u2, "zero_free_u2"), "negative.sturm")};
                 },
                 true});
  reg.push_back({"negative.confinement", "a synthetic from-zero branch crossing s1 = 1",
                 [](SuiteContext&) {
                   const PeriodicGrid g(fixtures::kTwoPi, 64);
                   Branch br;
                   br.seed = SeedKind::from_zero;
                   for (double a : {0.2, 0.6, 1.2}) {
                     BranchPoint pt;
                     pt.u = DiscreteField::sample(g, [a](double x) { return a * (1.0 + 0.5 * std::cos(x)) / 1.5; });
                     br.points.push_back(pt);
                   }
                   return std::vector<PropertyReport>{detail::named(
                       check_confinement(br, {-2.0, -1.0, 1.0, 2.0}, "crossing_s1"), "negative.confinement")};
                 },
                 true});

  // Companions asserting that every negative control fails.
  std::vector<CheckEntry> wrappers;
  for (const auto& e : reg) {
    if (!e.negative_control) continue;
    const std::string base = e.name.substr(std::string("negative.").size());
    auto run = e.run;
    wrappers.push_back({"control." + base + ".can_fail", "negative control '" + e.name + "' fails",
                        [run, base](SuiteContext& ctx) {
                          std::vector<PropertyReport> out;
                          for (const PropertyReport& r : run(ctx)) {
                            PropertyReport w = r;
                            w.name = "control." + base + ".can_fail";
                            w.passed = !r.passed;
                            out.push_back(std::move(w));
                          }
                          return out;
                        }});
  }
  reg.insert(reg.end(), wrappers.begin(), wrappers.end());
  return reg;
}

/// Names of the checks in the default suite (negative controls excluded).
inline std::vector<std::string> default_suite() {
  std::vector<std::string> out;
  for (const auto& e : check_registry()) {
    if (!e.negative_control) out.push_back(e.name);
  }
  return out;
}

/// Runs the named checks (all default checks when `names` is empty). Reports are ordered by
/// registry position, so the result does not depend on scheduling. A check that throws yields one
/// failed report with evidence {"exception": 1}.
inline std::vector<PropertyReport> run_suite(const std::vector<std::string>& names, SuiteContext& ctx) {
  const auto reg = check_registry();
  std::vector<const CheckEntry*> selected;
  const std::vector<std::string> wanted = names.empty() ? default_suite() : names;
  for (const auto& n : wanted) {
    auto it = std::find_if(reg.begin(), reg.end(), [&](const CheckEntry& e) { return e.name == n; });
    if (it == reg.end()) throw ConfigError("unknown check '" + n + "'");
    selected.push_back(&*it);
  }
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

  std::vector<std::vector<PropertyReport>> results(selected.size());
  parallel_for(selected.size(), ctx.jobs(), [&](std::size_t i) {
    try {
      results[i] = selected[i]->run(ctx);
    } catch (const std::exception& e) {
      spdlog::error("check {} raised: {}", selected[i]->name, e.what());
      results[i] = {PropertyReport{selected[i]->name, false, {{"exception", 1.0}}, 0.0, ""}};
    }
  });
  std::vector<PropertyReport> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

/// Runs checks from a fixture set (empty set, empty result).
inline std::vector<PropertyReport> run_suite_for(const std::vector<std::string>& names, SuiteContext& ctx,
                                                 bool empty_ok) {
  if (names.empty() && empty_ok) return {};
  return run_suite(names, ctx);
}

}  // namespace plap
