#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "plap/continuation.hpp"
#include "plap/discrete_operator.hpp"
#include "plap/errors.hpp"
#include "plap/linalg.hpp"
#include "plap/nonlinearity.hpp"
#include "plap/parallel.hpp"
#include "plap/problem.hpp"

namespace plap {

enum class SignFilter { both, positive, negative };

struct CountOptions {
  int n_starts = 20;
  std::uint64_t rng_seed = 1;
  double amplitude_min = 1e-2;
  double amplitude_max = 1e2;
  SignFilter signs = SignFilter::both;
  double dedup_tol = 1e-5;
  double newton_tol = 1e-10;
  int max_newton = 80;
  double epsilon_reg = 1e-10;
  double min_sup = 1e-8;              // solutions below this sup-norm count as trivial
  std::vector<DiscreteField> extra_seeds;  // e.g. branch points near the requested lambda
  int jobs = 1;
};

struct Solution {
  DiscreteField u;
  Sign sigma = Sign::plus;
  double sup_norm = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

// Damped Newton on L(u) - lambda m f(u) = 0 at fixed lambda.
inline std::optional<Solution> fixed_lambda_newton(const BranchSystem& sys, double lambda, DiscreteField u,
                                                   const CountOptions& opts) {
  auto rel_of = [&](const DiscreteField& v, DiscreteField& r) {
    r = sys.residual(lambda, v);
    const double scale = euclidean_norm(apply_operator(sys.spec(), v));
    return std::make_pair(euclidean_norm(r) / std::max(scale, 1e-300),
                          std::max(opts.newton_tol, rounding_floor(sys.spec(), v) / std::max(scale, 1e-300)));
  };
  DiscreteField r;
  auto [rel, ok] = rel_of(u, r);
  for (int it = 0; it <= opts.max_newton; ++it) {
    if (!std::isfinite(rel) || sup_norm(u) < opts.min_sup) return std::nullopt;
    if (rel <= ok) {
      Solution s;
      s.sup_norm = sup_norm(u);
      s.sigma = mean(u) >= 0.0 ? Sign::plus : Sign::minus;
      s.residual = rel;
      s.iterations = it;
      s.u = std::move(u);
      return s;
    }
    if (it == opts.max_newton) break;
    BorderedSystem jac = sys.jacobian(lambda, u);
    jac.cols.clear();
    BorderedSolution step;
    try {
      step = solve_bordered(jac, -1.0 * r, {});
    } catch (const NoConvergence&) {
      return std::nullopt;
    }
    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      DiscreteField un = u + t * step.main;
      DiscreteField rn;
      auto [reln, okn] = rel_of(un, rn);
      if (std::isfinite(reln) && euclidean_norm(rn) < (1.0 - 1e-4 * t) * euclidean_norm(r)) {
        u = std::move(un);
        r = std::move(rn);
        rel = reln;
        ok = okn;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  return std::nullopt;
}

// Smooth random one-sign profile with sup-norm 1.
inline DiscreteField random_profile(const PeriodicGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double a1 = 0.6 * unit(rng), b1 = 0.6 * unit(rng), a2 = 0.3 * unit(rng), b2 = 0.3 * unit(rng);
  DiscreteField u(g.size());
  const double w = 2.0 * std::numbers::pi / g.period();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    u[i] = 1.0 + a1 * std::cos(w * x) + b1 * std::sin(w * x) + a2 * std::cos(2 * w * x) + b2 * std::sin(2 * w * x);
  }
  const double lo = min_value(u);
  if (lo <= 0.05) {
    for (double& v : u) v += 0.05 - lo;
  }
  return (1.0 / sup_norm(u)) * u;
}

}  // namespace detail

/// Distinct one-sign solutions at fixed lambda found by multistart Newton. Seeds are amplitude
/// stratified on a log scale, alternate in sign, and are drawn before any solve so the result
/// does not depend on the number of jobs.
inline std::vector<Solution> count_solutions(const ProblemSpec& spec, const NonlinearitySpec& f, double lambda,
                                             const CountOptions& opts = {}) {
  if (opts.n_starts < 1) throw ConfigError("count_solutions needs n_starts >= 1");
  const BranchSystem sys(spec, f, false, opts.epsilon_reg);
  std::mt19937_64 rng(opts.rng_seed);
  std::vector<DiscreteField> seeds;
  const double lmin = std::log(opts.amplitude_min), lmax = std::log(opts.amplitude_max);
  for (int k = 0; k < opts.n_starts; ++k) {
    const double frac = opts.n_starts == 1 ? 0.5 : static_cast<double>(k) / (opts.n_starts - 1);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    const double amp = std::exp(lmin + (lmax - lmin) * frac + 0.1 * jitter(rng));
    double sign = k % 2 == 0 ? 1.0 : -1.0;
    if (opts.signs == SignFilter::positive) sign = 1.0;
    if (opts.signs == SignFilter::negative) sign = -1.0;
    seeds.push_back((sign * amp) * detail::random_profile(spec.grid(), rng));
  }
  for (const auto& s : opts.extra_seeds) {
    require_on_grid(spec, s, "count_solutions seed");
    seeds.push_back(s);
  }

  std::vector<std::optional<Solution>> found(seeds.size());
  parallel_for(seeds.size(), opts.jobs,
               [&](std::size_t i) { found[i] = detail::fixed_lambda_newton(sys, lambda, seeds[i], opts); });

  std::vector<Solution> out;
  for (auto& s : found) {
    if (!s) continue;
    if (!one_signed_with(s->u, s->sigma)) continue;
    if (opts.signs == SignFilter::positive && s->sigma != Sign::plus) continue;
    if (opts.signs == SignFilter::negative && s->sigma != Sign::minus) continue;
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const Solution& o) { return sup_distance(o.u, s->u) < opts.dedup_tol; });
    if (!dup) out.push_back(std::move(*s));
  }
  std::sort(out.begin(), out.end(), [](const Solution& a, const Solution& b) {
    if (a.sigma != b.sigma) return a.sigma == Sign::plus;
    return a.sup_norm < b.sup_norm;
  });
  return out;
}

}  // namespace plap
