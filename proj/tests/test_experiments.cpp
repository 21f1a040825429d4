#include <doctest.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "rosq/config.hpp"
#include "rosq/csv.hpp"
#include "rosq/experiments.hpp"

using namespace rosq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rosq_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Command {
  int status = -1;
  std::string output;  // stdout and stderr
};

Command run_cli(const std::string& args) {
  Command c;
  const std::string cmd = std::string(ROSQ_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) c.output.append(buf.data(), n);
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

ExperimentConfig pareto_config() {
  ExperimentConfig cfg;
  cfg.model.service_kind = "pareto";
  cfg.model.service_params = {1.5, 1.0};
  cfg.model.arrival_params = {0.1};
  cfg.model.load = 0.6;
  cfg.run.customers = 20000;
  cfg.run.warmup = 500;
  cfg.run.seed = 77;
  return cfg;
}

RunContext context(const fs::path& dir, std::ostream& out) {
  RunContext ctx;
  ctx.out_dir = dir.string();
  ctx.out = &out;
  return ctx;
}

}  // namespace

TEST_CASE("config text round trip") {
  ExperimentConfig cfg = pareto_config();
  cfg.model.discipline = Discipline::RandomInsertion;
  cfg.analysis.x_grid = {10, 100.5, 1e4};
  cfg.analysis.s_grid = {0.1, 1};
  cfg.analysis.confidence = 0.99;
  cfg.analysis.quantity = "busy-period";
  cfg.output_dir = "out/dir";
  CHECK(ExperimentConfig::parse(cfg.to_text()) == cfg);
  CHECK(ExperimentConfig::parse(ExperimentConfig{}.to_text()) == ExperimentConfig{});
}

TEST_CASE("config comments and whitespace") {
  const auto cfg = ExperimentConfig::parse(
      "# comment\n\n  model.service.kind = pareto  \nmodel.service.params = 1.5 , 2\nmodel.load=0.4\n");
  CHECK(cfg.model.service_kind == "pareto");
  CHECK(cfg.model.service_params == std::vector<double>{1.5, 2});
  CHECK(cfg.build_model().load() == doctest::Approx(0.4));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("model.nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("run.customers = many\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("just text\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("model.load = 1.2\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("model.arrival.params = 3\n"), StabilityError);
  CHECK_THROWS_AS(ExperimentConfig::parse("run.customers = 10\nrun.warmup = 10\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("model.discipline = lifo\n"), ConfigError);
  try {
    ExperimentConfig::load("/no/such/dir/exp.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/no/such/dir/exp.cfg") != std::string::npos);
  }
}

TEST_CASE("doubles print and parse back exactly") {
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123, -2.5e17, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  std::ostringstream out;
  CsvWriter w(out, {"a", "b"});
  w.row({1.5, 0.1});
  CHECK(out.str() == "a,b\n1.5,0.1\n");
  CHECK_THROWS(w.row({1.0}));
}

TEST_CASE("simulate writes customers and summary") {
  const auto dir = scratch("simulate");
  std::ostringstream out;
  cmd_simulate(pareto_config(), context(dir, out));
  const auto cust = lines(slurp(dir / "customers.csv"));
  REQUIRE(cust.size() == 19501);
  CHECK(cust[0] == "arrival_time,service_req,wait,workload,b_rp,z_rp");
  const auto summary = lines(slurp(dir / "summary.csv"));
  REQUIRE(summary.size() == 4);
  CHECK(summary[0] == "discipline,customers,busy_periods,mean_wait,mean_wait_se,mean_queue_length,little_rhs");
}

TEST_CASE("simulate on M/M/1 reproduces the mean wait") {
  ExperimentConfig cfg;
  cfg.model.arrival_params = {0.5};
  cfg.model.service_params = {1.0};
  cfg.model.discipline = Discipline::FCFS;
  cfg.run.customers = 200000;
  cfg.run.warmup = 2000;
  const auto dir = scratch("mm1");
  std::ostringstream out;
  cmd_simulate(cfg, context(dir, out));
  const auto summary = lines(slurp(dir / "summary.csv"));
  for (std::size_t i = 1; i < summary.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream row(summary[i]);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 7);
    const double mean = std::stod(cells[3]);
    const double se = std::stod(cells[4]);
    CAPTURE(cells[0]);
    CHECK(std::abs(mean - 1.0) <= 4 * se);
  }
}

TEST_CASE("outputs are byte-identical for a fixed seed") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  std::ostringstream out;
  auto cfg = pareto_config();
  cmd_simulate(cfg, context(a, out));
  cmd_simulate(cfg, context(b, out));
  cmd_compare_tails(cfg, context(a, out));
  RunContext multi = context(b, out);
  multi.jobs = 3;
  cmd_compare_tails(cfg, multi);
  for (const char* f : {"customers.csv", "summary.csv", "compare_tails.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("compare-tails header and ratio column") {
  const auto dir = scratch("tails");
  std::ostringstream out;
  auto cfg = pareto_config();
  cfg.run.customers = 100000;
  cmd_compare_tails(cfg, context(dir, out));
  const auto rows = lines(slurp(dir / "compare_tails.csv"));
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == "x,ccdf_ros,ccdf_fcfs,ratio,h");
}

TEST_CASE("lst table for M/M/1") {
  ExperimentConfig cfg;
  const auto dir = scratch("lst");
  std::ostringstream out;
  cmd_lst(cfg, context(dir, out));
  const auto rows = lines(slurp(dir / "lst.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "s,wait_lst_ros,wait_lst_fcfs,mu,epsilon");
  double prev = 2;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream row(rows[i]);
    std::string s, ros;
    std::getline(row, s, ',');
    std::getline(row, ros, ',');
    const double v = std::stod(ros);
    CHECK(v < prev);
    CHECK(v > 0);
    prev = v;
  }
}

TEST_CASE("h table default grid") {
  const auto dir = scratch("htable");
  std::ostringstream out;
  const auto start = std::chrono::steady_clock::now();
  cmd_h_table(ExperimentConfig{}, context(dir, out));
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  CHECK(took.count() < 60);
  const auto rows = lines(slurp(dir / "h_table.csv"));
  REQUIRE(rows.size() == 1 + 21 * 21);
  CHECK(rows[0] == "rho,nu,h");
  double lo = 2;
  for (std::size_t i = 1; i < rows.size(); ++i) lo = std::min(lo, std::stod(rows[i].substr(rows[i].rfind(',') + 1)));
  CHECK(lo == doctest::Approx(0.8856).epsilon(1e-3));
}

TEST_CASE("heavy-traffic, appendix and asym outputs") {
  const auto dir = scratch("misc");
  std::ostringstream out;
  ExperimentConfig cfg;
  cfg.model.load = 0.9;
  cfg.run.customers = 50000;
  cmd_heavytraffic(cfg, context(dir, out));
  CHECK(lines(slurp(dir / "heavytraffic_lst.csv"))[0] == "omega,empirical_lst,limit_lst");
  CHECK(lines(slurp(dir / "heavytraffic_ccdf.csv")).size() == 101);

  auto p = pareto_config();
  p.run.replications = 20;
  cmd_appendix_d(p, context(dir, out));
  CHECK(lines(slurp(dir / "appendix_d.csv")).size() == 4);
  p.run.replications = 1;
  CHECK_THROWS_AS(cmd_appendix_d(p, context(dir, out)), DomainError);

  p.analysis.quantity = "busy-period";
  cmd_asym(p, context(dir, out));
  CHECK(lines(slurp(dir / "asym.csv"))[0] == "x,formula_value,empirical_value,ratio,ci_lo,ci_hi");
  p.analysis.quantity = "nonsense";
  CHECK_THROWS_AS(cmd_asym(p, context(dir, out)), ConfigError);
}

TEST_CASE("unwritable output directory") {
  std::ostringstream out;
  RunContext ctx = context("/proc/no_such_dir", out);
  CHECK_THROWS_AS(cmd_lst(ExperimentConfig{}, ctx), ConfigError);
}

TEST_CASE("property checks all pass") {
  for (const auto& r : run_property_checks(2)) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("cli exit codes") {
  const auto missing = run_cli("--config /no/such.cfg lst");
  CHECK(missing.status == 2);
  CHECK(missing.output.find("/no/such.cfg") != std::string::npos);
  CHECK(run_cli("").status == 2);
  CHECK(run_cli("frobnicate").status == 2);
  CHECK(run_cli("--help").status == 0);
  CHECK(run_cli("--jobs 0 lst").status == 2);

  const auto dir = scratch("cli");
  const fs::path cfg = dir / "exp.cfg";
  std::ofstream(cfg) << "model.load = 1.5\n";
  CHECK(run_cli("--config " + cfg.string() + " lst").status == 2);
}

TEST_CASE("cli runs commands and verify") {
  const auto dir = scratch("cli_run");
  const fs::path cfg = dir / "exp.cfg";
  std::ofstream(cfg) << "model.service.kind = pareto\nmodel.service.params = 1.5, 1\nmodel.load = 0.5\n"
                        "run.customers = 20000\nrun.warmup = 100\n";
  const auto a = run_cli("--config " + cfg.string() + " --out " + (dir / "a").string() + " --seed 5 compare-tails");
  const auto b = run_cli("--config " + cfg.string() + " --out " + (dir / "b").string() + " --seed 5 --jobs 2 compare-tails");
  CHECK(a.status == 0);
  CHECK(b.status == 0);
  CHECK(slurp(dir / "a" / "compare_tails.csv") == slurp(dir / "b" / "compare_tails.csv"));
  const auto v = run_cli("verify");
  CHECK(v.status == 0);
  CHECK(v.output.find("FAIL") == std::string::npos);
}
