#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "plap/cli.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("plap");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("PLAP_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    if (level != "info") spdlog::warn("PLAP_LOG='{}' not one of error, info, debug; using info", level);
    spdlog::set_level(spdlog::level::info);
  }
}

struct Overrides {
  std::vector<std::pair<std::string, std::string>> items;

  void add(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { items.emplace_back(key, v); }, help + " (config key " + key + ")");
  }
};

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Periodic p-Laplacian with a sign-changing weight: eigenvalues and one-sign branches"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::optional<long long> seed;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--out", out_dir, "output directory (default: output_dir key)");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed (config key rng_seed)");
  app.add_option("--set", sets, "extra key=value assignment, repeatable");

  Overrides over;
  auto* eigen = app.add_subcommand("eigen", "principal eigenpairs lambda0+ and lambda0-");
  auto* scan = app.add_subcommand("scan", "oracle scan of a lambda window with an isolation report");
  auto* cont = app.add_subcommand("continue", "trace a one-sign branch from zero or from infinity");
  auto* count = app.add_subcommand("count", "distinct one-sign solutions at fixed lambda");
  auto* verify = app.add_subcommand("verify", "run the property suite");
  auto* sweep = app.add_subcommand("sweep-p", "principal eigenvalues over a list of exponents");
  auto* oracle = app.add_subcommand("oracle", "shooting-oracle eigenvalue candidates");
  for (auto* sub : {scan, oracle}) {
    over.add(sub, "--lo", "scan.lo", "window lower end");
    over.add(sub, "--hi", "scan.hi", "window upper end");
    over.add(sub, "--resolution", "scan.resolution", "lambda samples");
  }
  over.add(cont, "--nu", "cont.nu", "weight sign + or -");
  over.add(cont, "--sigma", "cont.sigma", "solution sign + or -");
  over.add(cont, "--from", "cont.from", "zero or infinity");
  over.add(count, "--lambda", "count.lambda", "lambda");
  over.add(verify, "--checks", "verify.checks", "comma-separated check names");
  over.add(sweep, "--p-list", "sweep.p_list", "comma-separated exponents");
  (void)eigen;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? plap::kExitOk : plap::kExitConfig;
  }

  plap::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = plap::load_config(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw plap::ConfigError("--set expects key=value, got '" + s + "'");
      plap::set_config_value(cfg, plap::detail::trim(s.substr(0, eq)), s.substr(eq + 1));
    }
    for (const auto& [k, v] : over.items) plap::set_config_value(cfg, k, v);
    if (seed) plap::set_config_value(cfg, "rng_seed", std::to_string(*seed));
  } catch (const plap::ConfigError& e) {
    spdlog::error("{}", e.what());
    return plap::kExitConfig;
  }

  plap::CommandContext ctx;
  ctx.out_dir = out_dir;
  ctx.jobs = jobs;
  return plap::run_command(app.get_subcommands().front()->get_name(), cfg, ctx);
}
