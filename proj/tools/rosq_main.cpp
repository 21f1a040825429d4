#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "rosq/config.hpp"
#include "rosq/errors.hpp"
#include "rosq/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::size_t default_jobs() {
  if (const char* env = std::getenv("ROSQ_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring ROSQ_JOBS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-server queue experiments: simulation, transforms and tail asymptotics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> jobs;
  app.add_option("--config", config_path, "Experiment config file (key = value)");
  app.add_option("--seed", seed, "Override run.seed");
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--jobs", jobs, "Worker threads (default: ROSQ_JOBS or all cores)")
      ->check(CLI::PositiveNumber);

  app.add_subcommand("simulate", "Simulate all disciplines; per-customer CSV and summary");
  app.add_subcommand("compare-tails", "ROS vs FCFS waiting-time tails on shared paths");
  app.add_subcommand("h-table", "Tabulate h(rho, nu)");
  app.add_subcommand("lst", "Waiting-time and busy-period transforms on the s grid");
  app.add_subcommand("heavytraffic", "Scaled ROS waits against heavy-traffic limits");
  app.add_subcommand("appendix-d", "Random vs deterministic arrival sums");
  app.add_subcommand("asym", "Empirical tail of a quantity against its asymptotic formula");
  app.add_subcommand("verify", "Run the property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    rosq::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = rosq::ExperimentConfig::load(config_path);
    if (seed) cfg.run.seed = *seed;
    rosq::RunContext ctx;
    ctx.out_dir = out_dir ? *out_dir : cfg.output_dir;
    ctx.jobs = jobs ? *jobs : default_jobs();
    ctx.out = &std::cout;

    if (command == "simulate") rosq::cmd_simulate(cfg, ctx);
    else if (command == "compare-tails") rosq::cmd_compare_tails(cfg, ctx);
    else if (command == "h-table") rosq::cmd_h_table(cfg, ctx);
    else if (command == "lst") rosq::cmd_lst(cfg, ctx);
    else if (command == "heavytraffic") rosq::cmd_heavytraffic(cfg, ctx);
    else if (command == "appendix-d") rosq::cmd_appendix_d(cfg, ctx);
    else if (command == "asym") rosq::cmd_asym(cfg, ctx);
    else if (command == "verify") return rosq::cmd_verify(ctx) ? kOk : kFailure;
  } catch (const rosq::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const rosq::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
