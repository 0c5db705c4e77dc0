#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "plap/plap.hpp"

using namespace plap;

namespace {

struct Outcome {
  bool passed = false;
  std::string evidence;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool all_passed(const std::vector<PropertyReport>& reports) {
  return !reports.empty() &&
         std::all_of(reports.begin(), reports.end(), [](const PropertyReport& r) { return r.passed; });
}

std::string failures(const std::vector<PropertyReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    if (!r.passed) out += fmt::format(" failed:{}[{}]", r.name, r.fixture_id);
  }
  return out;
}

double evidence_max(const std::vector<PropertyReport>& reports, const std::string& key) {
  double m = 0.0;
  for (const auto& r : reports) {
    auto it = r.evidence.find(key);
    if (it != r.evidence.end()) m = std::max(m, it->second);
  }
  return m;
}

double oracle_eigenvalue(const ProblemSpec& spec, double guess, int steps) {
  const IvpSetup setup = IvpSetup::eigen_form(spec, guess, steps);
  const AngleSearch a = minimize_over_angle(setup);
  return refine_eigenvalue(setup, guess, a.theta).first;
}

Outcome constant_problem() {
  Outcome o{true, ""};
  for (double p : {1.5, 2.0, 3.0}) {
    const auto t0 = Clock::now();
    const EigenPair e = principal_eigen(fixtures::constant(p, 1.0, 256), Sign::plus);
    const double dt = seconds_since(t0);
    const double spread = (max_value(e.u) - min_value(e.u)) / sup_norm(e.u);
    const bool ok = std::fabs(e.lambda - 1.0) <= 1e-8 && spread <= 1e-8 && dt < 1.0;
    o.passed = o.passed && ok;
    o.evidence += fmt::format(" p={}:|lambda-1|={:.2e},spread={:.2e},t={:.3f}s", p, std::fabs(e.lambda - 1.0),
                              spread, dt);
  }
  return o;
}

Outcome fourier_problem() {
  const auto t0 = Clock::now();
  const ProblemSpec spec = fixtures::fourier(2.0, 512);
  const EigenPair e = principal_eigen(spec, Sign::plus);
  const IsolationReport rep = spectrum_scan(spec, 0.5, 4.5);
  const double dt = seconds_since(t0);
  std::vector<double> found;
  for (const auto& f : rep.findings) found.push_back(f.candidate.lambda);
  std::sort(found.begin(), found.end());
  const bool spectrum_ok =
      found.size() == 2 && std::fabs(found[0] - 1.0) <= 1e-5 && std::fabs(found[1] - 2.0) <= 1e-5;
  std::string list;
  for (double l : found) list += fmt::format("{}{:.10g}", list.empty() ? "" : ",", l);
  return {std::fabs(e.lambda - 1.0) <= 1e-6 && spectrum_ok && dt < 10.0,
          fmt::format(" lambda0+={:.12g} scan={{{}}} t={:.2f}s", e.lambda, list, dt)};
}

Outcome cosine_symmetry() {
  const ProblemSpec spec = fixtures::cosine(2.0, 256);
  const EigenPair plus = principal_eigen(spec, Sign::plus);
  const EigenPair minus = principal_eigen(spec, Sign::minus);
  const double asym = std::fabs(plus.lambda + minus.lambda);
  double worst = 0.0;
  for (Sign nu : {Sign::plus, Sign::minus}) {
    const double grid = richardson_eigenvalue(spec, nu);
    const double lam = nu == Sign::plus ? plus.lambda : minus.lambda;
    worst = std::max(worst, std::fabs(grid - oracle_eigenvalue(spec, lam, 8192)));
  }
  return {minus.lambda < 0.0 && 0.0 < plus.lambda && asym <= 1e-5 && worst <= 1e-6,
          fmt::format(" lambda0+={:.10g} lambda0-={:.10g} |sum|={:.2e} grid_vs_oracle={:.2e}", plus.lambda,
                      minus.lambda, asym, worst)};
}

Outcome from_suite(SuiteContext& ctx, const std::vector<std::string>& names, const std::string& key = "") {
  const auto reports = run_suite(names, ctx);
  std::string ev = fmt::format(" reports={}", reports.size());
  if (!key.empty()) ev += fmt::format(" max_{}={:.3e}", key, evidence_max(reports, key));
  return {all_passed(reports), ev + failures(reports)};
}

Outcome p_continuity(SuiteContext& ctx) {
  const auto t0 = Clock::now();
  const auto reports = run_suite({"eigen.p_continuity"}, ctx);
  const double dt = seconds_since(t0);
  return {all_passed(reports) && dt < 120.0,
          fmt::format(" ratio={:.4f} t={:.1f}s", evidence_max(reports, "ratio"), dt) + failures(reports)};
}

Outcome sublinear_uniqueness(SuiteContext& ctx) {
  const ProblemSpec spec = fixtures::cosine(2.0, 256);
  const NonlinearitySpec f = fixtures::square_root(spec);
  const BranchSystem sys(spec, f, false);
  CountOptions opts;
  std::mt19937_64 rng(ctx.seed());
  bool ok = true;
  double worst = 0.0;
  int converged_min = 1 << 30;
  for (double lam : detail::sqrt_lambdas()) {
    std::vector<DiscreteField> sols;
    for (int k = 0; k < 20; ++k) {
      const double amp = std::exp(std::log(1e-2) + std::log(1e4) * k / 19.0);
      DiscreteField seed = detail::random_profile(spec.grid(), rng);
      for (auto& v : seed) v = amp * std::fabs(v);
      const auto s = detail::fixed_lambda_newton(sys, lam, seed, opts);
      if (s && one_signed_with(s->u, Sign::plus)) sols.push_back(s->u);
    }
    converged_min = std::min(converged_min, static_cast<int>(sols.size()));
    if (sols.empty()) ok = false;
    for (std::size_t i = 0; i < sols.size(); ++i) {
      for (std::size_t j = i + 1; j < sols.size(); ++j) worst = std::max(worst, sup_distance(sols[i], sols[j]));
    }
  }
  const auto cont = run_suite({"count.uniqueness", "count.lambda_continuity"}, ctx);
  double rmin = kInfinity(), rmax = 0.0;
  for (const auto& r : cont) {
    auto it = r.evidence.find("ratio");
    if (it == r.evidence.end()) continue;
    rmin = std::min(rmin, it->second);
    rmax = std::max(rmax, it->second);
  }
  return {ok && worst < 1e-6 && all_passed(cont),
          fmt::format(" max_pairwise={:.2e} min_converged={} halving_ratio=[{:.3f},{:.3f}]", worst, converged_min, rmin,
                      rmax) +
              failures(cont)};
}

Outcome a7_confinement(SuiteContext& ctx) {
  const auto conf = run_suite({"branch.confinement"}, ctx);
  const ProblemSpec spec = fixtures::cosine(2.0, 256);
  const NonlinearitySpec f = fixtures::a7(spec);
  const double lam = 1.5 * ctx.eigen("cosine_p2", spec, Sign::plus).lambda / f.finf();
  CountOptions opts;
  opts.n_starts = 40;
  opts.rng_seed = ctx.seed();
  opts.jobs = ctx.jobs();
  const auto sols = count_solutions(spec, f, lam, opts);
  return {all_passed(conf) && sols.size() >= 4,
          fmt::format(" confinement_reports={} solutions_at_{:.6g}={}", conf.size(), lam, sols.size()) +
              failures(conf)};
}

Outcome double_zero(SuiteContext& ctx) {
  const auto pos = run_suite({"branch.no_double_zero"}, ctx);
  const auto neg = run_suite({"negative.no_double_zero"}, ctx);
  const bool control_fails = !neg.empty() && !neg.front().passed;
  return {all_passed(pos) && control_fails,
          fmt::format(" branch_reports={} negative_control_failed={}", pos.size(), control_fails) + failures(pos)};
}

Outcome oracle_equivalence(SuiteContext& ctx) {
  const auto agree = run_suite({"oracle.branch_agreement"}, ctx);
  bool ok = all_passed(agree);
  std::string ev = fmt::format(" points={} max_profile_error={:.2e} max_lambda_error={:.2e}", agree.size(),
                               evidence_max(agree, "profile_error"), evidence_max(agree, "lambda_error"));
  for (double p : {2.0, 1.5, 3.0}) {
    const ProblemSpec coarse = fixtures::cosine(p, 128);
    const double e1 = principal_eigen(coarse, Sign::plus).lambda;
    const double e2 = principal_eigen(coarse.with_grid(coarse.grid().refined()), Sign::plus).lambda;
    const double ref = oracle_eigenvalue(coarse, e2, p == 2.0 ? 8192 : 65536);
    const double ratio = std::fabs(e1 - ref) / std::fabs(e2 - ref);
    const double need = p == 2.0 ? 3.5 : 1.8;
    ok = ok && ratio >= need;
    ev += fmt::format(" ratio_p{}={:.3f}", p, ratio);
  }
  return {ok, ev + failures(agree)};
}

Outcome verify_reproducible() {
  const auto root = std::filesystem::temp_directory_path() / fmt::format("plap_acceptance_{}", ::getpid());
  RunConfig cfg;
  cfg.verify_checks = {"eigen.residual", "eigen.simplicity", "count.multiplicity", "count.uniqueness"};
  std::ostringstream sink;
  auto read = [](const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  CommandContext a{(root / "a").string(), 1, &sink};
  CommandContext b{(root / "b").string(), 4, &sink};
  const int ca = cmd_verify(cfg, a);
  const int cb = cmd_verify(cfg, b);
  const std::string ra = read(root / "a" / "verify_report.json");
  const std::string rb = read(root / "b" / "verify_report.json");
  std::filesystem::remove_all(root);
  return {ca == kExitOk && cb == kExitOk && !ra.empty() && ra == rb,
          fmt::format(" exit={},{} bytes={},{} identical={}", ca, cb, ra.size(), rb.size(), ra == rb)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  SuiteContext ctx(1, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));

  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"AC01", "constant problem: lambda0+ = 1, constant eigenfunction, < 1 s", constant_problem},
      {"AC02", "Fourier problem: lambda0+ = 1, scan of [0.5, 4.5] is {1, 2}, < 10 s", fourier_problem},
      {"AC03", "cos weight: lambda0- = -lambda0+, grid matches oracle", cosine_symmetry},
      {"AC04", "principal eigenpairs: one sign, simple, isolated gap, others change sign",
       [&] {
         return from_suite(ctx, {"eigen.one_signed", "eigen.simplicity", "eigen.nonexistence_gap",
                                 "eigen.nonprincipal_sign_change"});
       }},
      {"AC05", "continuity in p: jump ratio >= 1.8 under p-grid halving, < 2 min", [&] { return p_continuity(ctx); }},
      {"AC06", "rational f: bifurcation at lambda0+/f0, asymptote lambda0+/finf",
       [&] { return from_suite(ctx, {"branch.bifurcation_point", "branch.asymptote"}, "relative_error"); }},
      {"AC07", "from-infinity branch matches from-zero tail at sup 10..50",
       [&] { return from_suite(ctx, {"branch.from_infinity_consistency"}, "max_lambda_difference"); }},
      {"AC08", "sqrt f: unique positive solution, Lipschitz in lambda", [&] { return sublinear_uniqueness(ctx); }},
      {"AC09", "zero-pattern f: confinement and at least four solutions", [&] { return a7_confinement(ctx); }},
      {"AC10", "no double zeros on branches, negative control fails", [&] { return double_zero(ctx); }},
      {"AC11", "oracle reproduces branch points; grid error ratios", [&] { return oracle_equivalence(ctx); }},
      {"AC12", "verify reports are byte-identical across runs", verify_reproducible},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format(" exception: {}", e.what())};
    }
    if (!o.passed) ++failed;
    std::cout << fmt::format("{} {} {} ({:.1f}s){}", o.passed ? "PASS" : "FAIL", c.id, c.title, seconds_since(t0),
                             o.evidence)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} acceptance criteria passed", criteria.size() - failed, criteria.size())
            << std::endl;
  return failed == 0 ? 0 : 1;
}
