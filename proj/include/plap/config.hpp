#pragma once

#include <spdlog/fmt/fmt.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "plap/coefficients.hpp"
#include "plap/continuation.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/fixtures.hpp"
#include "plap/nonlinearity.hpp"
#include "plap/problem.hpp"
#include "plap/shooting.hpp"
#include "plap/solution_count.hpp"

namespace plap {

/// Shortest text that reads back to the same double.
inline std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  for (int digits = 1; digits <= 17; ++digits) {
    std::string s = fmt::format("{:.{}g}", x, digits);
    if (std::stod(s) == x) return s;
  }
  return fmt::format("{:.17g}", x);
}

inline std::string format_reals(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_real(xs[i]);
  return out;
}

/// Coefficient as (kind, params): constant "c"; cosine "a,b,k"; piecewise "v0,b1,v1,...,bk,vk";
/// samples "u_0,...,u_{N-1}".
struct CoefficientConfig {
  std::string kind = "constant";
  std::vector<double> params{1.0};

  Coefficient build() const {
    auto need = [&](std::size_t n) {
      if (params.size() != n) {
        throw ConfigError("coefficient kind '" + kind + "' needs " + std::to_string(n) + " params, got " +
                          std::to_string(params.size()));
      }
    };
    if (kind == "constant") {
      need(1);
      return Coefficient::constant(params[0]);
    }
    if (kind == "cosine") {
      need(3);
      if (params[2] != std::round(params[2])) throw ConfigError("cosine frequency k must be an integer");
      return Coefficient::cosine(params[0], params[1], static_cast<int>(params[2]));
    }
    if (kind == "piecewise") {
      if (params.size() % 2 == 0) throw ConfigError("piecewise params alternate value,break,...,value (odd count)");
      std::vector<double> breaks, values;
      for (std::size_t i = 0; i < params.size(); ++i) (i % 2 == 0 ? values : breaks).push_back(params[i]);
      return Coefficient::piecewise(std::move(breaks), std::move(values));
    }
    if (kind == "samples") return Coefficient::samples(params);
    throw ConfigError("unknown coefficient kind '" + kind + "' (expected constant, cosine, piecewise, samples)");
  }

  friend bool operator==(const CoefficientConfig&, const CoefficientConfig&) = default;
};

/// Flat key = value run configuration. Every key has a default; unknown keys are rejected.
struct RunConfig {
  double p = 2.0;
  double T = fixtures::kTwoPi;
  std::size_t N = 256;
  CoefficientConfig q{"constant", {1.0}};
  CoefficientConfig m{"constant", {1.0}};

  std::string f_family = "phi_p";
  std::vector<std::pair<std::string, double>> f_params;
  std::string f_cutoff = "none";
  double f_cutoff_n = 0.0;

  double solver_tol_residual = 1e-12;
  int solver_max_newton = 60;
  double solver_epsilon_reg = 1e-10;
  int eigen_max_iterations = 2000;
  double eigen_lambda_tol = 1e-10;

  std::string cont_nu = "+";
  std::string cont_sigma = "+";
  std::string cont_from = "zero";
  double cont_step0 = 0.05;
  double cont_step_min = 1e-6;
  double cont_step_max = 1.0;
  double cont_norm_cap = 50.0;
  double cont_norm_floor = 1.0;
  double cont_lambda_lo = -100.0;
  double cont_lambda_hi = 100.0;
  int cont_max_points = 2000;
  double cont_newton_tol = 1e-10;
  int cont_max_newton = 12;

  double scan_lo = 0.0;
  double scan_hi = 5.0;
  int scan_resolution = 201;
  int scan_steps = 4096;
  int scan_angle_samples = 48;

  double count_lambda = 1.0;
  int count_n_starts = 20;
  std::string count_signs = "both";
  double count_amplitude_min = 1e-2;
  double count_amplitude_max = 1e2;

  std::vector<double> sweep_p_list{1.5, 2.0, 2.5, 3.0};
  std::vector<std::string> verify_checks;

  std::uint64_t rng_seed = 1;
  std::string output_dir = "out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  ProblemSpec problem() const {
    return ProblemSpec(PExponent(p), PeriodicGrid(T, N), q.build(), m.build());
  }

  NonlinearitySpec nonlinearity() const {
    std::map<std::string, double> v(f_params.begin(), f_params.end());
    NonlinearitySpec f = NonlinearitySpec::from_family(PExponent(p), f_family, v);
    return f.with_cutoff(parse_cutoff(f_cutoff), f_cutoff_n);
  }

  EigenOptions eigen_options() const {
    EigenOptions o;
    o.solve.tol_residual = solver_tol_residual;
    o.solve.max_newton = solver_max_newton;
    o.solve.epsilon_reg = solver_epsilon_reg;
    o.max_iterations = eigen_max_iterations;
    o.lambda_tol = eigen_lambda_tol;
    return o;
  }

  ContinuationControls controls() const {
    ContinuationControls c;
    c.step0 = cont_step0;
    c.step_min = cont_step_min;
    c.step_max = cont_step_max;
    c.norm_cap = cont_norm_cap;
    c.norm_floor = cont_norm_floor;
    c.lambda_lo = cont_lambda_lo;
    c.lambda_hi = cont_lambda_hi;
    c.max_points = cont_max_points;
    c.newton_tol = cont_newton_tol;
    c.max_newton = cont_max_newton;
    c.epsilon_reg = solver_epsilon_reg;
    return c;
  }

  SeedKind seed_kind() const {
    if (cont_from == "zero") return SeedKind::from_zero;
    if (cont_from == "infinity") return SeedKind::from_infinity;
    throw ConfigError("cont.from must be zero or infinity, got '" + cont_from + "'");
  }

  ScanOptions scan_options(int jobs) const {
    ScanOptions s;
    s.resolution = scan_resolution;
    s.steps = scan_steps;
    s.angle_samples = scan_angle_samples;
    s.jobs = jobs;
    return s;
  }

  CountOptions count_options(int jobs) const {
    CountOptions c;
    c.n_starts = count_n_starts;
    c.rng_seed = rng_seed;
    c.amplitude_min = count_amplitude_min;
    c.amplitude_max = count_amplitude_max;
    if (count_signs == "both") {
      c.signs = SignFilter::both;
    } else if (count_signs == "positive") {
      c.signs = SignFilter::positive;
    } else if (count_signs == "negative") {
      c.signs = SignFilter::negative;
    } else {
      throw ConfigError("count.signs must be both, positive or negative, got '" + count_signs + "'");
    }
    c.epsilon_reg = solver_epsilon_reg;
    c.jobs = jobs;
    return c;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return kInfinity();
  if (t == "-inf") return -kInfinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': '" + text + "' is not a real number");
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

inline std::vector<double> parse_reals(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_real(key, s));
  return out;
}

// Accessors binding each key to a RunConfig member, in serialization order.
struct KeyBinding {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
KeyBinding real_key(const char* key, T RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return format_real(c.*member); },
          [member, key](RunConfig& c, const std::string& v) { c.*member = parse_real(key, v); }};
}

template <typename T>
KeyBinding int_key(const char* key, T RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return std::to_string(c.*member); },
          [member, key](RunConfig& c, const std::string& v) {
            const long long x = parse_integer(key, v);
            if (x < 0 && std::is_unsigned_v<T>) throw ConfigError("key '" + std::string(key) + "' must be >= 0");
            c.*member = static_cast<T>(x);
          }};
}

inline KeyBinding text_key(const char* key, std::string RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, const std::string& v) { c.*member = trim(v); }};
}

inline KeyBinding coefficient_keys(const char* kind_key, CoefficientConfig RunConfig::*member) {
  return {kind_key, [member](const RunConfig& c) { return (c.*member).kind; },
          [member](RunConfig& c, const std::string& v) { (c.*member).kind = trim(v); }};
}

inline KeyBinding coefficient_params(const char* key, CoefficientConfig RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return format_reals((c.*member).params); },
          [member, key](RunConfig& c, const std::string& v) { (c.*member).params = parse_reals(key, v); }};
}

inline const std::vector<KeyBinding>& key_bindings() {
  static const std::vector<KeyBinding> keys = [] {
    std::vector<KeyBinding> k;
    k.push_back(real_key("p", &RunConfig::p));
    k.push_back(real_key("T", &RunConfig::T));
    k.push_back(int_key("N", &RunConfig::N));
    k.push_back(coefficient_keys("q.kind", &RunConfig::q));
    k.push_back(coefficient_params("q.params", &RunConfig::q));
    k.push_back(coefficient_keys("m.kind", &RunConfig::m));
    k.push_back(coefficient_params("m.params", &RunConfig::m));
    k.push_back(text_key("f.family", &RunConfig::f_family));
    k.push_back({"f.params",
                 [](const RunConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.f_params.size(); ++i) {
                     out += (i ? "," : "") + c.f_params[i].first + ":" + format_real(c.f_params[i].second);
                   }
                   return out;
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.f_params.clear();
                   for (const auto& item : split(v, ',')) {
                     const auto colon = item.find(':');
                     if (colon == std::string::npos) throw ConfigError("f.params entries are name:value, got '" + item + "'");
                     c.f_params.emplace_back(trim(item.substr(0, colon)), parse_real("f.params", item.substr(colon + 1)));
                   }
                 }});
    k.push_back(text_key("f.cutoff", &RunConfig::f_cutoff));
    k.push_back(real_key("f.cutoff_n", &RunConfig::f_cutoff_n));
    k.push_back(real_key("solver.tol_residual", &RunConfig::solver_tol_residual));
    k.push_back(int_key("solver.max_newton", &RunConfig::solver_max_newton));
    k.push_back(real_key("solver.epsilon_reg", &RunConfig::solver_epsilon_reg));
    k.push_back(int_key("eigen.max_iterations", &RunConfig::eigen_max_iterations));
    k.push_back(real_key("eigen.lambda_tol", &RunConfig::eigen_lambda_tol));
    k.push_back(text_key("cont.nu", &RunConfig::cont_nu));
    k.push_back(text_key("cont.sigma", &RunConfig::cont_sigma));
    k.push_back(text_key("cont.from", &RunConfig::cont_from));
    k.push_back(real_key("cont.step0", &RunConfig::cont_step0));
    k.push_back(real_key("cont.step_min", &RunConfig::cont_step_min));
    k.push_back(real_key("cont.step_max", &RunConfig::cont_step_max));
    k.push_back(real_key("cont.norm_cap", &RunConfig::cont_norm_cap));
    k.push_back(real_key("cont.norm_floor", &RunConfig::cont_norm_floor));
    k.push_back(real_key("cont.lambda_lo", &RunConfig::cont_lambda_lo));
    k.push_back(real_key("cont.lambda_hi", &RunConfig::cont_lambda_hi));
    k.push_back(int_key("cont.max_points", &RunConfig::cont_max_points));
    k.push_back(real_key("cont.newton_tol", &RunConfig::cont_newton_tol));
    k.push_back(int_key("cont.max_newton", &RunConfig::cont_max_newton));
    k.push_back(real_key("scan.lo", &RunConfig::scan_lo));
    k.push_back(real_key("scan.hi", &RunConfig::scan_hi));
    k.push_back(int_key("scan.resolution", &RunConfig::scan_resolution));
    k.push_back(int_key("scan.steps", &RunConfig::scan_steps));
    k.push_back(int_key("scan.angle_samples", &RunConfig::scan_angle_samples));
    k.push_back(real_key("count.lambda", &RunConfig::count_lambda));
    k.push_back(int_key("count.n_starts", &RunConfig::count_n_starts));
    k.push_back(text_key("count.signs", &RunConfig::count_signs));
    k.push_back(real_key("count.amplitude_min", &RunConfig::count_amplitude_min));
    k.push_back(real_key("count.amplitude_max", &RunConfig::count_amplitude_max));
    k.push_back({"sweep.p_list", [](const RunConfig& c) { return format_reals(c.sweep_p_list); },
                 [](RunConfig& c, const std::string& v) { c.sweep_p_list = parse_reals("sweep.p_list", v); }});
    k.push_back({"verify.checks",
                 [](const RunConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.verify_checks.size(); ++i) out += (i ? "," : "") + c.verify_checks[i];
                   return out;
                 },
                 [](RunConfig& c, const std::string& v) { c.verify_checks = split(v, ','); }});
    k.push_back(int_key("rng_seed", &RunConfig::rng_seed));
    k.push_back(text_key("output_dir", &RunConfig::output_dir));
    return k;
  }();
  return keys;
}

}  // namespace detail

/// All keys with their effective values, in a fixed order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& b : detail::key_bindings()) out.emplace_back(b.key, b.get(c));
  return out;
}

inline std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& [k, v] : config_entries(c)) out += k + " = " + v + "\n";
  return out;
}

/// Applies one key = value assignment; q.samples / m.samples are shorthand for kind = samples plus
/// params. Throws ConfigError naming an unknown key.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "q.samples" || key == "m.samples") {
    CoefficientConfig& coef = key[0] == 'q' ? c.q : c.m;
    coef.kind = "samples";
    coef.params = detail::parse_reals(key, value);
    return;
  }
  for (const auto& b : detail::key_bindings()) {
    if (key == b.key) {
      b.set(c, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

/// Parses flat "key = value" text; '#' starts a comment line, blank lines are ignored.
inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" + t + "'");
    }
    set_config_value(base, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return base;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace plap
