#include "rosq/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "rosq/asymptotics.hpp"
#include "rosq/csv.hpp"
#include "rosq/empirical.hpp"
#include "rosq/heavy_traffic.hpp"
#include "rosq/numerics.hpp"
#include "rosq/parallel.hpp"
#include "rosq/transforms.hpp"

namespace rosq {

namespace {

std::ostream& out_of(const RunContext& ctx) { return ctx.out ? *ctx.out : std::cout; }

std::ofstream open_output(const RunContext& ctx, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  const auto path = std::filesystem::path(ctx.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file '" + path.string() + "'");
  return f;
}

void finish(std::ofstream& f, const RunContext& ctx, const std::string& name) {
  f.flush();
  if (!f) {
    const auto path = std::filesystem::path(ctx.out_dir) / name;
    throw ConfigError("write failed for '" + path.string() + "'");
  }
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  auto v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  return v;
}

/// Log grid between the empirical ccdf levels 0.5 and max(1e-4, 100/n).
std::vector<double> tail_grid(const EmpiricalTail& tail, std::size_t points = 30) {
  const double p_lo = std::max(1e-4, 100.0 / static_cast<double>(tail.size()));
  double lo = tail.x_at_ccdf(0.5);
  const double hi = tail.x_at_ccdf(p_lo);
  if (!(lo > 0.0)) lo = hi * 1e-3;
  if (!(hi > lo)) return {hi};
  return logspace(lo, hi, points);
}

struct WaitCollector : SimSink {
  std::vector<double> waits;
  std::vector<double> busy;
  std::vector<double> z_rp;
  std::vector<double> b_rp;
  bool keep_residuals = false;
  void customer(const CustomerRecord& c) override {
    waits.push_back(c.wait);
    if (keep_residuals) {
      z_rp.push_back(c.z_rp);
      b_rp.push_back(c.b_rp);
    }
  }
  void busy_period(const BusyPeriodRecord& b) override { busy.push_back(b.length); }
};

struct CsvSink : SimSink {
  CsvWriter* csv;
  std::vector<double> waits;
  explicit CsvSink(CsvWriter* w) : csv(w) {}
  void customer(const CustomerRecord& c) override {
    waits.push_back(c.wait);
    if (csv) csv->row({c.arrival_time, c.service_req, c.wait, c.workload, c.b_rp, c.z_rp});
  }
};

double h_or_nan(const QueueModel& model) {
  const auto rv = model.service().regular_variation();
  if (!rv || !model.poisson_arrivals()) return std::numeric_limits<double>::quiet_NaN();
  return h_constant(model.load(), rv->index).h;
}

}  // namespace

void cmd_simulate(const ExperimentConfig& cfg, const RunContext& ctx) {
  const QueueModel model = cfg.build_model();
  const auto& run = cfg.run;
  const std::string run_name = "customers.csv";
  const std::string summary_name = "summary.csv";

  auto run_file = open_output(ctx, run_name);
  auto summary_file = open_output(ctx, summary_name);
  CsvWriter summary(summary_file, {"discipline", "customers", "busy_periods", "mean_wait",
                                   "mean_wait_se", "mean_queue_length", "little_rhs"});
  auto& out = out_of(ctx);
  out << "load: " << format_double(model.load()) << '\n';

  const Discipline order[] = {Discipline::FCFS, Discipline::ROS, Discipline::RandomInsertion};
  for (const Discipline d : order) {
    const bool primary = d == model.discipline();
    std::optional<CsvWriter> csv;
    if (primary) {
      csv.emplace(run_file, std::initializer_list<std::string>{
                                "arrival_time", "service_req", "wait", "workload", "b_rp",
                                "z_rp"});
    }
    CsvSink sink(csv ? &*csv : nullptr);
    const RunSummary s =
        simulate_stream(model.with_discipline(d), run.customers, run.warmup, run.seed, sink);
    const MeanEstimate m = batch_means(sink.waits);
    summary.text_row({to_string(d), std::to_string(s.recorded), std::to_string(s.busy_periods),
                      format_double(m.mean), format_double(m.std_error),
                      format_double(s.mean_queue_length), format_double(s.little_rhs)});
    out << to_string(d) << ": mean_wait " << format_double(m.mean) << " (se "
        << format_double(m.std_error) << "), busy_periods " << s.busy_periods
        << ", little " << format_double(s.mean_queue_length) << " vs "
        << format_double(s.little_rhs) << '\n';
  }
  finish(run_file, ctx, run_name);
  finish(summary_file, ctx, summary_name);
}

void cmd_compare_tails(const ExperimentConfig& cfg, const RunContext& ctx) {
  const QueueModel model = cfg.build_model();
  const auto& run = cfg.run;
  WaitCollector ros_sink;
  WaitCollector fcfs_sink;
  simulate_stream(model.with_discipline(Discipline::ROS), run.customers, run.warmup, run.seed,
                  ros_sink);
  simulate_stream(model.with_discipline(Discipline::FCFS), run.customers, run.warmup,
                  run.seed, fcfs_sink);
  const EmpiricalTail ros(std::move(ros_sink.waits));
  const EmpiricalTail fcfs(std::move(fcfs_sink.waits));
  const auto grid = cfg.analysis.x_grid.empty() ? tail_grid(fcfs) : cfg.analysis.x_grid;
  const double h = h_or_nan(model);

  const std::string name = "compare_tails.csv";
  auto file = open_output(ctx, name);
  CsvWriter csv(file, {"x", "ccdf_ros", "ccdf_fcfs", "ratio", "h"});
  for (const double x : grid) {
    const double r = ros.ccdf(x);
    const double f = fcfs.ccdf(x);
    const double ratio = f > 0.0 ? r / f : std::numeric_limits<double>::quiet_NaN();
    csv.row({x, r, f, ratio, h});
  }
  finish(file, ctx, name);

  auto& out = out_of(ctx);
  const double x3 = fcfs.x_at_ccdf(1e-3);
  out << "rows: " << grid.size() << " -> " << name << '\n';
  out << "x at fcfs ccdf 1e-3: " << format_double(x3) << ", ratio there "
      << format_double(ros.ccdf(x3) / fcfs.ccdf(x3)) << ", h " << format_double(h) << '\n';
}

void cmd_h_table(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto rhos = cfg.analysis.rho_grid.empty() ? linspace(0.0, 1.0, 21) : cfg.analysis.rho_grid;
  const auto nus = cfg.analysis.nu_grid.empty() ? linspace(1.0, 2.0, 21) : cfg.analysis.nu_grid;
  for (const double r : rhos) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("analysis.rho_grid values must lie in [0, 1]");
  }
  for (const double n : nus) {
    if (!(n >= 1.0 && n <= 2.0)) throw ConfigError("analysis.nu_grid values must lie in [1, 2]");
  }
  std::vector<double> values(rhos.size() * nus.size());
  parallel_for(values.size(), ctx.jobs, [&](std::size_t k) {
    const double rho = rhos[k / nus.size()];
    const double nu = nus[k % nus.size()];
    if (rho == 0.0) values[k] = 1.0;
    else if (rho == 1.0) values[k] = gamma_fn(nu);
    else values[k] = h_constant(rho, nu).h;
  });

  const std::string name = "h_table.csv";
  auto file = open_output(ctx, name);
  CsvWriter csv(file, {"rho", "nu", "h"});
  std::size_t arg_min = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    csv.row({rhos[k / nus.size()], nus[k % nus.size()], values[k]});
    if (values[k] < values[arg_min]) arg_min = k;
  }
  finish(file, ctx, name);

  // rho -> h is reported, not asserted.
  std::size_t increasing = 0;
  for (std::size_t i = 1; i < rhos.size(); ++i) {
    for (std::size_t j = 0; j < nus.size(); ++j) {
      if (values[i * nus.size() + j] > values[(i - 1) * nus.size() + j] + 1e-12) ++increasing;
    }
  }
  auto& out = out_of(ctx);
  out << "rows: " << values.size() << " -> " << name << '\n';
  out << "min h: " << format_double(values[arg_min]) << " at rho "
      << format_double(rhos[arg_min / nus.size()]) << ", nu "
      << format_double(nus[arg_min % nus.size()]) << '\n';
  out << "rho steps where h increases: " << increasing << '\n';
}

void cmd_lst(const ExperimentConfig& cfg, const RunContext& ctx) {
  const QueueModel model = cfg.build_model();
  const LstEvaluator lst(model);
  const auto grid =
      cfg.analysis.s_grid.empty() ? std::vector<double>{0.1, 1.0, 10.0} : cfg.analysis.s_grid;
  std::vector<std::array<double, 5>> rows(grid.size());
  parallel_for(grid.size(), ctx.jobs, [&](std::size_t i) {
    const double s = grid[i];
    rows[i] = {s, lst.wait_lst_ros(s), lst.wait_lst_fcfs(s), lst.busy_lst(s), lst.epsilon(s)};
  });
  const std::string name = "lst.csv";
  auto file = open_output(ctx, name);
  CsvWriter csv(file, {"s", "wait_lst_ros", "wait_lst_fcfs", "mu", "epsilon"});
  for (const auto& r : rows) csv.row(r);
  finish(file, ctx, name);
  out_of(ctx) << "rows: " << rows.size() << " -> " << name << '\n';
}

void cmd_heavytraffic(const ExperimentConfig& cfg, const RunContext& ctx) {
  const QueueModel model = cfg.build_model().with_discipline(Discipline::ROS);
  if (!model.poisson_arrivals()) {
    throw ConfigError("heavytraffic needs exponential arrivals");
  }
  const double rho = model.load();
  const double lambda = model.arrival_rate();
  const auto rv = model.service().regular_variation();
  const double variance = model.service().variance();
  const bool light = std::isfinite(variance);
  if (!light && !rv) throw ConfigError("heavytraffic needs finite variance or a Pareto service law");
  const double delta = light ? delta_light(rho, variance, lambda)
                             : delta_heavy(rho, rv->index, rv->bingham_C, lambda);

  WaitCollector sink;
  simulate_stream(model, cfg.run.customers, cfg.run.warmup, cfg.run.seed, sink);
  for (auto& w : sink.waits) w *= delta;

  auto& out = out_of(ctx);
  out << "delta: " << format_double(delta) << '\n';

  const auto omegas = cfg.analysis.omega_grid.empty() ? std::vector<double>{0.5, 1.0, 2.0}
                                                      : cfg.analysis.omega_grid;
  const std::string lst_name = "heavytraffic_lst.csv";
  auto lst_file = open_output(ctx, lst_name);
  CsvWriter lst_csv(lst_file, {"omega", "empirical_lst", "limit_lst"});
  double lst_dev = 0.0;
  if (light) {
    for (const double w : omegas) {
      double sum = 0.0;
      for (const double x : sink.waits) sum += std::exp(-w * x);
      const double emp = sum / static_cast<double>(sink.waits.size());
      const double lim = ht_lst_light(w);
      lst_dev = std::max(lst_dev, std::abs(emp - lim));
      lst_csv.row({w, emp, lim});
    }
  } else {
    const auto rep = ht_heavy_check(sink.waits, omegas, rv->index);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      lst_csv.row({rep.omega[i], rep.empirical[i], rep.limit[i]});
    }
    lst_dev = rep.max_deviation;
  }
  finish(lst_file, ctx, lst_name);
  out << "max |lst deviation|: " << format_double(lst_dev) << " -> " << lst_name << '\n';

  if (light) {
    const auto grid = cfg.analysis.x_grid.empty() ? linspace(0.05, 5.0, 100) : cfg.analysis.x_grid;
    const auto rep = ht_light_check(sink.waits, grid);
    const std::string name = "heavytraffic_ccdf.csv";
    auto file = open_output(ctx, name);
    CsvWriter csv(file, {"x", "empirical_ccdf", "limit_ccdf"});
    for (std::size_t i = 0; i < rep.x.size(); ++i) csv.row({rep.x[i], rep.empirical[i], rep.limit[i]});
    finish(file, ctx, name);
    out << "sup ccdf deviation: " << format_double(rep.sup_deviation) << " -> " << name << '\n';
  }
}

void cmd_appendix_d(const ExperimentConfig& cfg, const RunContext& ctx) {
  const QueueModel model = cfg.build_model();
  const double c = 1.0 - model.load();
  const auto grid =
      cfg.analysis.x_grid.empty() ? std::vector<double>{1e2, 1e3, 1e4} : cfg.analysis.x_grid;
  const std::string name = "appendix_d.csv";
  auto file = open_output(ctx, name);
  CsvWriter csv(file, {"x", "c", "random_sum", "random_sum_se", "deterministic_sum",
                       "integrated", "ratio_random", "ratio_deterministic"});
  auto& out = out_of(ctx);
  for (const double x : grid) {
    const auto r = appendix_d_check(c, x, model, cfg.run.replications, cfg.run.seed, ctx.jobs);
    csv.row({r.x, r.c, r.random_sum, r.random_sum_se, r.deterministic_sum, r.integrated,
             r.ratio_random, r.ratio_deterministic});
    out << "x " << format_double(x) << ": ratios " << format_double(r.ratio_random) << ", "
        << format_double(r.ratio_deterministic) << '\n';
  }
  finish(file, ctx, name);
}

void cmd_asym(const ExperimentConfig& cfg, const RunContext& ctx) {
  const QueueModel model = cfg.build_model();
  const std::string& q = cfg.analysis.quantity;
  std::string curve_name;
  if (q == "wait") {
    curve_name = model.discipline() == Discipline::FCFS ? "fcfs-regular-variation"
                                                        : "ros-four-term";
  } else if (q == "busy-period" || q == "residual-busy" || q == "residual-service") {
    curve_name = q;
  } else {
    throw ConfigError("analysis.quantity must be wait, busy-period, residual-busy or "
                      "residual-service, got '" + q + "'");
  }
  const TailCurve curve = make_tail_curve(curve_name, model);

  WaitCollector sink;
  sink.keep_residuals = q == "residual-busy" || q == "residual-service";
  simulate_stream(model, cfg.run.customers, cfg.run.warmup, cfg.run.seed, sink);
  std::vector<double> sample;
  if (q == "wait") sample = std::move(sink.waits);
  else if (q == "busy-period") sample = std::move(sink.busy);
  else if (q == "residual-busy") sample = std::move(sink.z_rp);
  else sample = std::move(sink.b_rp);
  const EmpiricalTail tail(std::move(sample));
  const auto grid = cfg.analysis.x_grid.empty() ? tail_grid(tail) : cfg.analysis.x_grid;
  const double hw = tail.dkw_halfwidth(cfg.analysis.confidence);

  std::vector<double> formula(grid.size());
  parallel_for(grid.size(), ctx.jobs,
               [&](std::size_t i) { formula[i] = evaluate_clipped(curve, grid[i]).value; });

  const std::string name = "asym.csv";
  auto file = open_output(ctx, name);
  CsvWriter csv(file, {"x", "formula_value", "empirical_value", "ratio", "ci_lo", "ci_hi"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double emp = tail.ccdf(grid[i]);
    csv.row({grid[i], formula[i], emp, emp / formula[i], std::max(0.0, emp - hw),
             std::min(1.0, emp + hw)});
  }
  finish(file, ctx, name);
  out_of(ctx) << "curve: " << curve.label << " (" << curve.validity_note << ")\n"
              << "rows: " << grid.size() << " -> " << name << '\n';
}

bool cmd_verify(const RunContext& ctx) {
  auto& out = out_of(ctx);
  bool ok = true;
  for (const auto& r : run_property_checks(ctx.jobs)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  out.flush();
  return ok;
}

}  // namespace rosq
