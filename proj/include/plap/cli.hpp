#pragma once

#include <spdlog/spdlog.h>

#include <iostream>
#include <string>
#include <vector>

#include "plap/config.hpp"
#include "plap/continuation.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/output.hpp"
#include "plap/shooting.hpp"
#include "plap/solution_count.hpp"
#include "plap/verify.hpp"

namespace plap {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitProperty = 3 };

struct CommandContext {
  std::string out_dir;  // empty: cfg.output_dir
  int jobs = 1;
  std::ostream* console = &std::cout;
};

namespace detail {

inline OutputDir output_for(const RunConfig& cfg, const CommandContext& ctx) {
  return OutputDir(ctx.out_dir.empty() ? cfg.output_dir : ctx.out_dir);
}

inline Json json_header(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["command"] = command;
  j["config"] = config_json(cfg);
  return j;
}

}  // namespace detail

/// Principal eigenpairs for every feasible sign: eigen.csv, eigen.json, eigenfunction_{plus,minus}.csv.
inline int cmd_eigen(const RunConfig& cfg, const CommandContext& ctx = {}) {
  const ProblemSpec spec = cfg.problem();
  const OutputDir out = detail::output_for(cfg, ctx);
  auto csv = out.open("eigen.csv");
  write_config_header(csv, "eigen", cfg);
  csv << kEigenColumns << "\n";
  Json j = detail::json_header("eigen", cfg);
  j["results"] = Json::array();
  for (Sign nu : {Sign::plus, Sign::minus}) {
    const bool feasible = nu == Sign::plus ? spec.coeffs().weight_has_positive_part()
                                           : spec.coeffs().weight_has_negative_part();
    if (!feasible) {
      spdlog::info("eigen: no principal eigenvalue for nu = {} (weight has no such part)", sign_name(nu));
      continue;
    }
    const EigenPair e = principal_eigen(spec, nu, cfg.eigen_options());
    spdlog::info("eigen: lambda0{} = {:.12g} ({} iterations)", sign_name(nu), e.lambda, e.iterations);
    write_eigen_row(csv, spec, e);
    j["results"].push_back({{"nu", sign_name(nu)},
                            {"lambda", e.lambda},
                            {"relative_residual", e.relative_residual},
                            {"normalization_error", e.normalization_error},
                            {"iterations", e.iterations}});
    auto prof = out.open(nu == Sign::plus ? "eigenfunction_plus.csv" : "eigenfunction_minus.csv");
    write_config_header(prof, "eigen", cfg);
    write_profile(prof, spec.grid(), e.u);
  }
  out.write_json("eigen.json", j);
  return kExitOk;
}

/// Scans [scan.lo, scan.hi] with the oracle: scan_candidates.csv and scan.json (isolation report).
inline int cmd_scan(const RunConfig& cfg, const CommandContext& ctx = {}) {
  if (!(cfg.scan_lo < cfg.scan_hi)) throw ConfigError("scan needs scan.lo < scan.hi");
  const ProblemSpec spec = cfg.problem();
  const IsolationReport rep = spectrum_scan(spec, cfg.scan_lo, cfg.scan_hi, cfg.scan_options(ctx.jobs),
                                            cfg.eigen_options());
  const OutputDir out = detail::output_for(cfg, ctx);
  auto csv = out.open("scan_candidates.csv");
  write_config_header(csv, "scan", cfg);
  csv << "lambda,u0,v0,mismatch,multiplicity,sign_changes,principal\n";
  Json j = detail::json_header("scan", cfg);
  j["lo"] = rep.lo;
  j["hi"] = rep.hi;
  if (rep.lambda0_plus) j["lambda0_plus"] = *rep.lambda0_plus;
  if (rep.lambda0_minus) j["lambda0_minus"] = *rep.lambda0_minus;
  if (rep.delta_plus) j["delta_plus"] = *rep.delta_plus;
  if (rep.delta_minus) j["delta_minus"] = *rep.delta_minus;
  j["match_tol"] = rep.match_tol;
  j["passed"] = rep.passed;
  j["candidates"] = Json::array();
  for (const auto& f : rep.findings) {
    const auto& c = f.candidate;
    csv << format_real(c.lambda) << "," << format_real(c.u0) << "," << format_real(c.v0) << ","
        << format_real(c.mismatch) << "," << c.multiplicity << "," << c.sign_changes << ","
        << (f.principal ? 1 : 0) << "\n";
    j["candidates"].push_back({{"lambda", c.lambda},
                               {"multiplicity", c.multiplicity},
                               {"sign_changes", c.sign_changes},
                               {"principal", f.principal}});
  }
  out.write_json("scan.json", j);
  spdlog::info("scan: {} candidates in [{}, {}], isolation {}", rep.findings.size(), rep.lo, rep.hi,
               rep.passed ? "holds" : "fails");
  return kExitOk;
}

/// Traces one branch: branch.csv and branch.json.
inline int cmd_continue(const RunConfig& cfg, const CommandContext& ctx = {}) {
  const ProblemSpec spec = cfg.problem();
  const NonlinearitySpec f = cfg.nonlinearity();
  const Sign nu = parse_sign(cfg.cont_nu);
  const Sign sigma = parse_sign(cfg.cont_sigma);
  const SeedKind kind = cfg.seed_kind();
  const ContinuationControls ctl = cfg.controls();
  const Branch br = kind == SeedKind::from_zero
                        ? continue_from_zero(spec, f, nu, sigma, ctl, cfg.eigen_options())
                        : seed_from_infinity(spec, f, nu, sigma, ctl, cfg.eigen_options());
  const std::string id = branch_id(br, f.family());
  const OutputDir out = detail::output_for(cfg, ctx);
  auto csv = out.open("branch.csv");
  write_config_header(csv, "continue", cfg);
  csv << kBranchColumns << "\n";
  write_branch_rows(csv, br, id);
  Json j = detail::json_header("continue", cfg);
  j["branch"] = branch_summary(br, id);
  out.write_json("branch.json", j);
  spdlog::info("continue: {} points, terminated by {}", br.points.size(), termination_name(br.termination));
  return kExitOk;
}

/// Distinct one-sign solutions at count.lambda: solutions.csv and solution_profiles.csv.
inline int cmd_count(const RunConfig& cfg, const CommandContext& ctx = {}) {
  const ProblemSpec spec = cfg.problem();
  const NonlinearitySpec f = cfg.nonlinearity();
  const auto sols = count_solutions(spec, f, cfg.count_lambda, cfg.count_options(ctx.jobs));
  const OutputDir out = detail::output_for(cfg, ctx);
  auto csv = out.open("solutions.csv");
  write_config_header(csv, "count", cfg);
  csv << "index,sigma,sup_norm,min,max,residual,newton_iters\n";
  auto prof = out.open("solution_profiles.csv");
  write_config_header(prof, "count", cfg);
  prof << "index,x,u\n";
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const Solution& s = sols[k];
    csv << k << "," << sign_name(s.sigma) << "," << format_real(s.sup_norm) << "," << format_real(min_value(s.u))
        << "," << format_real(max_value(s.u)) << "," << format_real(s.residual) << "," << s.iterations << "\n";
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      prof << k << "," << format_real(spec.grid().node(i)) << "," << format_real(s.u[i]) << "\n";
    }
  }
  spdlog::info("count: {} one-sign solutions at lambda = {}", sols.size(), cfg.count_lambda);
  return kExitOk;
}

/// Runs the property suite (verify.checks, default suite when empty): verify_report.json and a
/// table on the console. Exit 3 when any check fails.
inline int cmd_verify(const RunConfig& cfg, const CommandContext& ctx = {}) {
  SuiteContext suite(cfg.rng_seed, ctx.jobs);
  const auto reports = run_suite(cfg.verify_checks, suite);
  const OutputDir out = detail::output_for(cfg, ctx);
  Json j = detail::json_header("verify", cfg);
  j["reports"] = reports_json(reports);
  out.write_json("verify_report.json", j);
  print_report_table(*ctx.console, reports);
  const auto failed = std::count_if(reports.begin(), reports.end(), [](const PropertyReport& r) { return !r.passed; });
  spdlog::info("verify: {} reports, {} failed", reports.size(), failed);
  return failed == 0 ? kExitOk : kExitProperty;
}

/// Principal eigenvalues over sweep.p_list: p_sweep.csv.
inline int cmd_sweep_p(const RunConfig& cfg, const CommandContext& ctx = {}) {
  const ProblemSpec base = cfg.problem();
  const auto rows = p_sweep(base, cfg.sweep_p_list, cfg.eigen_options());
  const OutputDir out = detail::output_for(cfg, ctx);
  auto csv = out.open("p_sweep.csv");
  write_config_header(csv, "sweep-p", cfg);
  csv << "p,lambda_plus,lambda_minus\n";
  for (const auto& r : rows) {
    csv << format_real(r.p) << "," << (r.lambda_plus ? format_real(*r.lambda_plus) : "") << ","
        << (r.lambda_minus ? format_real(*r.lambda_minus) : "") << "\n";
  }
  return kExitOk;
}

/// Oracle eigenvalue candidates in [scan.lo, scan.hi]: oracle_candidates.csv.
inline int cmd_oracle(const RunConfig& cfg, const CommandContext& ctx = {}) {
  if (!(cfg.scan_lo < cfg.scan_hi)) throw ConfigError("oracle needs scan.lo < scan.hi");
  const ProblemSpec spec = cfg.problem();
  const auto cands = oracle_scan(spec, cfg.scan_lo, cfg.scan_hi, cfg.scan_options(ctx.jobs));
  const OutputDir out = detail::output_for(cfg, ctx);
  auto csv = out.open("oracle_candidates.csv");
  write_config_header(csv, "oracle", cfg);
  csv << kOracleColumns << "\n";
  write_oracle_rows(csv, cands);
  spdlog::info("oracle: {} candidates", cands.size());
  return kExitOk;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"eigen", "scan", "continue", "count", "verify", "sweep-p", "oracle"};
  return names;
}

/// Dispatches a command and maps errors to exit codes: 1 for config/usage problems, 2 for
/// numerical failures.
inline int run_command(const std::string& name, const RunConfig& cfg, const CommandContext& ctx = {}) {
  try {
    if (name == "eigen") return cmd_eigen(cfg, ctx);
    if (name == "scan") return cmd_scan(cfg, ctx);
    if (name == "continue") return cmd_continue(cfg, ctx);
    if (name == "count") return cmd_count(cfg, ctx);
    if (name == "verify") return cmd_verify(cfg, ctx);
    if (name == "sweep-p") return cmd_sweep_p(cfg, ctx);
    if (name == "oracle") return cmd_oracle(cfg, ctx);
    spdlog::error("unknown command '{}'", name);
    return kExitConfig;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const InapplicableFixture& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const GridMismatch& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kExitNumerical;
  }
}

}  // namespace plap
