#pragma once

#include <spdlog/fmt/fmt.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "plap/config.hpp"
#include "plap/continuation.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/shooting.hpp"
#include "plap/solution_count.hpp"
#include "plap/verify.hpp"

namespace plap {

using Json = nlohmann::ordered_json;

/// Header block of every CSV: the command, then the full effective config as "# key = value".
inline void write_config_header(std::ostream& os, const std::string& command, const RunConfig& cfg) {
  os << "# plap " << command << "\n";
  for (const auto& [k, v] : config_entries(cfg)) os << "# " << k << " = " << v << "\n";
}

inline Json config_json(const RunConfig& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : config_entries(cfg)) j[k] = v;
  return j;
}

/// JSON numbers cannot be infinite; such values are written as strings.
inline Json real_json(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream os(dir_ / name);
    if (!os) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
    return os;
  }

  void write_json(const std::string& name, const Json& j) const {
    auto os = open(name);
    os << j.dump(2) << "\n";
  }

  const std::filesystem::path& path() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

inline const char* kEigenColumns = "p,T,N,nu,lambda,residual,normalization";

inline void write_eigen_row(std::ostream& os, const ProblemSpec& spec, const EigenPair& e) {
  os << format_real(e.p) << "," << format_real(spec.grid().period()) << "," << spec.grid().size() << ","
     << sign_name(e.nu) << "," << format_real(e.lambda) << "," << format_real(e.relative_residual) << ","
     << format_real(e.normalization_error) << "\n";
}

inline void write_profile(std::ostream& os, const PeriodicGrid& g, const DiscreteField& u) {
  os << "x,u\n";
  for (std::size_t i = 0; i < u.size(); ++i) os << format_real(g.node(i)) << "," << format_real(u[i]) << "\n";
}

inline const char* kBranchColumns = "branch_id,nu,sigma,index,lambda,sup_norm,w_norm,arclength,newton_iters,residual";

inline std::string branch_id(const Branch& br, const std::string& family) {
  return fmt::format("{}/{}/nu{}/sigma{}", family, seed_name(br.seed), sign_name(br.nu), sign_name(br.sigma));
}

inline void write_branch_rows(std::ostream& os, const Branch& br, const std::string& id) {
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const BranchPoint& pt = br.points[i];
    os << id << "," << sign_name(br.nu) << "," << sign_name(br.sigma) << "," << i << "," << format_real(pt.lambda)
       << "," << format_real(pt.sup_norm) << "," << format_real(pt.w_norm) << "," << format_real(pt.arclength)
       << "," << pt.newton_iters << "," << format_real(pt.residual) << "\n";
  }
}

inline Json branch_summary(const Branch& br, const std::string& id) {
  Json j;
  j["branch_id"] = id;
  j["nu"] = sign_name(br.nu);
  j["sigma"] = sign_name(br.sigma);
  j["seed"] = seed_name(br.seed);
  j["seed_description"] = br.seed_description;
  j["termination"] = termination_name(br.termination);
  j["points"] = br.points.size();
  if (!br.points.empty()) {
    j["first"] = {{"lambda", br.points.front().lambda}, {"sup_norm", br.points.front().sup_norm}};
    j["last"] = {{"lambda", br.points.back().lambda}, {"sup_norm", br.points.back().sup_norm}};
  }
  return j;
}

inline const char* kOracleColumns = "lambda,u0,v0,mismatch";

inline void write_oracle_rows(std::ostream& os, const std::vector<OracleCandidate>& cands) {
  for (const auto& c : cands) {
    os << format_real(c.lambda) << "," << format_real(c.u0) << "," << format_real(c.v0) << ","
       << format_real(c.mismatch) << "\n";
  }
}

inline Json report_json(const PropertyReport& r) {
  Json j;
  j["name"] = r.name;
  j["passed"] = r.passed;
  Json ev = Json::object();
  for (const auto& [k, v] : r.evidence) ev[k] = real_json(v);
  j["evidence"] = ev;
  j["tolerance"] = real_json(r.tolerance);
  j["fixture_id"] = r.fixture_id;
  return j;
}

inline Json reports_json(const std::vector<PropertyReport>& reports) {
  Json a = Json::array();
  for (const auto& r : reports) a.push_back(report_json(r));
  return a;
}

/// Fixed-width table: status, check, fixture, evidence.
inline void print_report_table(std::ostream& os, const std::vector<PropertyReport>& reports) {
  std::size_t wn = 5, wf = 7;
  for (const auto& r : reports) {
    wn = std::max(wn, r.name.size());
    wf = std::max(wf, r.fixture_id.size());
  }
  os << fmt::format("{:<6} {:<{}} {:<{}} {}\n", "status", "check", wn, "fixture", wf, "evidence");
  for (const auto& r : reports) {
    std::string ev;
    for (const auto& [k, v] : r.evidence) ev += fmt::format("{}{}={:.6g}", ev.empty() ? "" : " ", k, v);
    os << fmt::format("{:<6} {:<{}} {:<{}} {}\n", r.passed ? "PASS" : "FAIL", r.name, wn, r.fixture_id, wf, ev);
  }
}

}  // namespace plap
