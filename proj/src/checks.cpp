#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "rosq/asymptotics.hpp"
#include "rosq/csv.hpp"
#include "rosq/empirical.hpp"
#include "rosq/experiments.hpp"
#include "rosq/numerics.hpp"
#include "rosq/transforms.hpp"

namespace rosq {

namespace {

class Detail {
 public:
  Detail() { out_ << std::setprecision(6); }
  template <class T>
  Detail& operator<<(const T& v) {
    out_ << v;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

CheckResult make(std::string name, bool ok, const Detail& d) {
  return {std::move(name), ok, d.str()};
}

std::vector<double> grid(double a, double b, double step) {
  std::vector<double> v;
  for (int i = 0;; ++i) {
    const double x = a + step * i;
    if (x > b + 1e-9) break;
    v.push_back(x);
  }
  return v;
}

QueueModel mpareto(double rho, double nu = 1.5, Discipline d = Discipline::ROS) {
  return QueueModel(make_exponential(0.01), make_pareto(nu, 1.0), d).with_load(rho);
}

// numerics

CheckResult quadrature_linearity() {
  Rng rng(7, Stream::Sampler);
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> p(6), q(6);
    for (auto& c : p) c = 2.0 * rng.uniform() - 1.0;
    for (auto& c : q) c = 2.0 * rng.uniform() - 1.0;
    const double a = 4.0 * rng.uniform() - 2.0;
    const double b = 4.0 * rng.uniform() - 2.0;
    const double lo = -rng.uniform();
    const double hi = 1.0 + 2.0 * rng.uniform();
    auto poly = [](const std::vector<double>& c, double x) {
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
      return v;
    };
    auto f = [&](double x) { return poly(p, x); };
    auto g = [&](double x) { return poly(q, x); };
    auto fg = [&](double x) { return a * poly(p, x) + b * poly(q, x); };
    const auto rf = integrate_adaptive(f, lo, hi);
    const auto rg = integrate_adaptive(g, lo, hi);
    const auto rfg = integrate_adaptive(fg, lo, hi);
    const double diff = std::abs(rfg.value - a * rf.value - b * rg.value);
    const double bound =
        2.0 * (rfg.error_estimate + std::abs(a) * rf.error_estimate +
               std::abs(b) * rg.error_estimate) +
        8.0 * std::numeric_limits<double>::epsilon() *
            (std::abs(rfg.value) + std::abs(a * rf.value) + std::abs(b * rg.value));
    worst = std::max(worst, diff);
    ok = ok && diff <= bound;
  }
  return make("quadrature linearity", ok, Detail() << "25 polynomial pairs, max diff " << worst);
}

CheckResult gamma_recurrence() {
  double worst = 0.0;
  for (const double x : grid(0.6, 5.0, 0.1)) {
    worst = std::max(worst, std::abs(gamma_fn(x + 1.0) / (x * gamma_fn(x)) - 1.0));
  }
  return make("gamma recurrence", worst <= 1e-10, Detail() << "max rel error " << worst);
}

CheckResult bessel_monotone() {
  double prev = std::numeric_limits<double>::infinity();
  bool ok = true;
  std::size_t points = 0;
  for (double lx = -4.0; lx <= 2.7; lx += 0.01, ++points) {
    const double v = bessel_k1(std::pow(10.0, lx));
    ok = ok && v < prev && v > 0.0;
    prev = v;
  }
  return make("bessel_k1 decreasing", ok, Detail() << points << " points on [1e-4, 500]");
}

CheckResult root_residual() {
  const double tol = 1e-12;
  std::vector<std::pair<RealFunction, std::pair<double, double>>> cases = {
      {[](double x) { return x * x - 2.0; }, {0.0, 2.0}},
      {[](double x) { return std::cos(x) - x; }, {0.0, 1.0}},
      {[](double x) { return std::exp(x) - 10.0; }, {0.0, 5.0}},
      {[](double x) { return std::pow(x, 0.5) - 0.1; }, {0.0, 1.0}},
  };
  double worst = 0.0;
  bool ok = true;
  for (const auto& [f, br] : cases) {
    const auto r = find_root_bracketed(f, br.first, br.second, tol);
    const double res = std::abs(f(r.root));
    worst = std::max(worst, res);
    ok = ok && res <= tol;
  }
  return make("root residual", ok, Detail() << "max |f(root)| " << worst << " (tol 1e-12)");
}

// distributions

CheckResult pareto_forward_tail() {
  const auto d = make_pareto(1.5, 1.0);
  double worst = 0.0;
  for (double lx = -0.5; lx <= 4.0; lx += 0.25) {
    const double x = std::pow(10.0, lx);
    const double exact = d.forward_tail(x);
    worst = std::max(worst, std::abs(forward_tail_by_quadrature(d, x) - exact) / exact);
  }
  return make("pareto forward tail", worst <= 1e-9, Detail() << "max rel error " << worst);
}

CheckResult lst_consistency() {
  double worst = 0.0;
  for (const auto& d : {make_pareto(1.5, 1.0), make_weibull(0.5, 1.0), make_weibull(2.0, 1.0)}) {
    for (const double s : {0.01, 0.1, 1.0}) {
      worst = std::max(worst, std::abs(d.lst(s) - lst_by_quadrature(d, s)));
    }
  }
  return make("lst closed form vs quadrature", worst <= 1e-7, Detail() << "max diff " << worst);
}

CheckResult bingham_doney() {
  const auto d = make_pareto(1.5, 1.0);
  const double c = d.regular_variation()->bingham_C;
  Detail det;
  double last = 0.0;
  for (const double s : {1e-2, 1e-3, 1e-4}) {
    last = d.lst_defect(s) / (c * std::pow(s, 1.5));
    det << "s=" << s << ": " << last << "  ";
  }
  return make("bingham-doney ratio", std::abs(last - 1.0) <= 0.05, det);
}

CheckResult sampler_ks() {
  const std::size_t n = 100000;
  const double crit = std::sqrt(-std::log(0.005) / 2.0) / std::sqrt(static_cast<double>(n));
  Detail det;
  bool ok = true;
  int k = 0;
  for (const auto& d : {make_pareto(1.5, 1.0), make_exponential(2.0), make_weibull(0.5, 1.0)}) {
    Rng rng(11, Stream::Sampler, k++);
    std::vector<double> x(n);
    for (auto& v : x) v = d.sample(rng);
    const double ks = ks_distance_to(std::move(x), [&](double v) { return d.cdf(v); });
    ok = ok && ks < crit;
    det << d.name() << " " << ks << "  ";
  }
  det << "(1% critical " << crit << ")";
  return make("sampler KS", ok, det);
}

// desim

struct Recorder : SimSink {
  std::vector<CustomerRecord> customers;
  std::vector<BusyPeriodRecord> busy;
  void customer(const CustomerRecord& c) override { customers.push_back(c); }
  void busy_period(const BusyPeriodRecord& b) override { busy.push_back(b); }
};

struct DisciplineRuns {
  Recorder runs[3];
  RunSummary summaries[3];
};

const DisciplineRuns& discipline_runs() {
  static const DisciplineRuns runs = [] {
    DisciplineRuns r;
    const Discipline ds[] = {Discipline::FCFS, Discipline::ROS, Discipline::RandomInsertion};
    const QueueModel m = mpareto(0.7);
    for (int i = 0; i < 3; ++i) {
      r.summaries[i] = simulate_stream(m.with_discipline(ds[i]), 100000, 1000, 5, r.runs[i]);
    }
    return r;
  }();
  return runs;
}

CheckResult pathwise_invariance() {
  const auto& r = discipline_runs();
  const auto& base = r.runs[0];
  bool ok = true;
  for (int i = 1; i < 3; ++i) {
    const auto& o = r.runs[i];
    ok = ok && o.customers.size() == base.customers.size() && o.busy.size() == base.busy.size();
    for (std::size_t k = 0; ok && k < base.customers.size(); ++k) {
      const auto& a = base.customers[k];
      const auto& b = o.customers[k];
      ok = a.index == b.index && a.arrival_time == b.arrival_time && a.workload == b.workload &&
           a.b_rp == b.b_rp && a.z_rp == b.z_rp;
    }
    for (std::size_t k = 0; ok && k < base.busy.size(); ++k) {
      ok = base.busy[k].start == o.busy[k].start && base.busy[k].length == o.busy[k].length &&
           base.busy[k].customers_served == o.busy[k].customers_served;
    }
  }
  return make("pathwise discipline invariance", ok,
              Detail() << base.customers.size() << " customers, " << base.busy.size()
                       << " busy periods, M/Pareto/1 rho=0.7");
}

CheckResult mean_wait_invariance() {
  const QueueModel m(make_exponential(1.0), make_exponential(2.0), Discipline::FCFS);
  MeanEstimate est[3];
  const Discipline ds[] = {Discipline::FCFS, Discipline::ROS, Discipline::RandomInsertion};
  for (int i = 0; i < 3; ++i) {
    struct : SimSink {
      std::vector<double> w;
      void customer(const CustomerRecord& c) override { w.push_back(c.wait); }
    } sink;
    simulate_stream(m.with_discipline(ds[i]), 1000000, 1000, 3, sink);
    est[i] = batch_means(sink.w);
  }
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double se = std::hypot(est[i].std_error, est[j].std_error);
      worst = std::max(worst, std::abs(est[i].mean - est[j].mean) / se);
    }
  }
  return make("mean wait invariance", worst <= 4.0,
              Detail() << "means " << est[0].mean << ", " << est[1].mean << ", " << est[2].mean
                       << "; max gap " << worst << " SE");
}

CheckResult lindley() {
  const auto& c = discipline_runs().runs[0].customers;
  double worst = 0.0;
  bool ok = true;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    if (c[k + 1].index != c[k].index + 1) continue;
    const double gap = c[k + 1].arrival_time - c[k].arrival_time;
    const double lindley = std::max(0.0, c[k].wait + c[k].service_req - gap);
    const double err = std::abs(lindley - c[k + 1].wait);
    // Waits are differences of absolute clock readings; allow their rounding.
    const double clock_ulp = 4.0 * std::numeric_limits<double>::epsilon() * c[k + 1].arrival_time;
    ok = ok && err <= clock_ulp;
    worst = std::max(worst, err);
  }
  return make("lindley recursion under FCFS", ok, Detail() << "max |diff| " << worst);
}

CheckResult residual_bounds() {
  bool ok = true;
  std::size_t n = 0;
  for (const auto& run : discipline_runs().runs) {
    for (const auto& c : run.customers) {
      ok = ok && c.wait >= c.b_rp && c.wait <= c.z_rp;
      ++n;
    }
  }
  return make("B^rp <= W <= Z^rp", ok, Detail() << n << " records");
}

CheckResult busy_accounting() {
  const auto& r = discipline_runs();
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto& run = r.runs[i];
    std::uint64_t tau = 0;
    for (const auto& b : run.busy) tau += b.customers_served;
    ok = ok && tau == r.summaries[i].customers_served && tau >= run.customers.size();
    // Sum member service requirements per busy period; the final busy period
    // may hold unrecorded customers and is skipped.
    std::size_t k = 0;
    for (std::size_t b = 0; b + 1 < run.busy.size(); ++b) {
      double sum = 0.0;
      for (std::uint64_t m = 0; m < run.busy[b].customers_served; ++m) sum += run.customers[k++].service_req;
      const double err = std::abs(sum - run.busy[b].length);
      const double end = run.busy[b].start + run.busy[b].length;
      ok = ok && err <= 4.0 * std::numeric_limits<double>::epsilon() * end *
                            static_cast<double>(run.busy[b].customers_served);
      worst = std::max(worst, err);
    }
  }
  return make("busy-period accounting", ok, Detail() << "max |Z - sum B| " << worst);
}

// transforms

CheckResult lst_forms_agree() {
  double worst = 0.0;
  for (const double rho : {0.3, 0.5, 0.8}) {
    const LstEvaluator e(mpareto(rho));
    for (const double s : {0.1, 1.0, 10.0}) {
      const double a = e.wait_lst_ros(s);
      worst = std::max(worst, std::abs(e.wait_lst_ros_unsimplified(s) - a) / a);
    }
  }
  return make("lst evaluators agree", worst <= 1e-5, Detail() << "max rel diff " << worst);
}

CheckResult lst_monotone_convex() {
  const LstEvaluator e(mpareto(0.7));
  std::vector<double> s, v;
  for (double ls = -3.0; ls <= 2.0; ls += 0.25) {
    s.push_back(std::pow(10.0, ls));
    v.push_back(e.wait_lst_ros(s.back()));
  }
  bool ok = true;
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double slope = (v[i] - v[i - 1]) / (s[i] - s[i - 1]);
    ok = ok && slope < 0.0 && slope >= prev_slope;
    prev_slope = slope;
  }
  return make("wait_lst_ros decreasing and convex", ok, Detail() << s.size() << " points");
}

CheckResult heavy_traffic_identity() {
  // The remainder is (1 - rho)(1 + rho eps/(beta s) int Psi du) <= (1 - rho)(1 + rho).
  double worst_excess = -1.0;
  double worst_constant = 0.0;
  for (const double rho : {0.9, 0.95, 0.99}) {
    const LstEvaluator e(mpareto(rho));
    for (const double s : {0.1, 1.0}) {
      const double diff = std::abs(e.wait_lst_ros(s) - e.fcfs_composed_term(s));
      worst_excess = std::max(worst_excess, diff - (1e-4 + (1.0 + rho) * (1.0 - rho)));
      worst_constant = std::max(worst_constant, diff / (1.0 - rho));
    }
  }
  return make("fcfs-composed form within 1e-4 + (1 + rho)(1 - rho)", worst_excess <= 0.0,
              Detail() << "max |diff| / (1 - rho) " << worst_constant);
}

CheckResult psi_bound() {
  double worst = -1.0;
  std::size_t n = 0;
  for (const double rho : {0.5, 0.9}) {
    const LstEvaluator e(mpareto(rho));
    for (const double s : {0.01, 0.1, 1.0, 10.0}) {
      const double mu = e.busy_lst(s);
      for (int k = 0; k <= 10; ++k) {
        const double z = mu + (1.0 - mu) * k / 10.0;
        const double bound = std::exp(-(1.0 - z) / (e.service_mean() * s));
        worst = std::max(worst, e.psi(s, z) - bound);
        ++n;
      }
    }
  }
  return make("psi bound", worst <= 1e-12, Detail() << n << " points, max psi - bound " << worst);
}

// asymptotics

CheckResult h_endpoints() {
  double worst = 0.0;
  for (const double rho : grid(0.1, 0.9, 0.1)) {
    worst = std::max({worst, std::abs(h_constant(rho, 1.0).h - 1.0),
                      std::abs(h_constant(rho, 2.0).h - 1.0)});
  }
  return make("h endpoints", worst <= 1e-8, Detail() << "max |h - 1| " << worst);
}

CheckResult h_below_one() {
  double largest = 0.0;
  for (const double rho : grid(0.1, 0.9, 0.1)) {
    for (const double nu : grid(1.1, 1.9, 0.1)) largest = std::max(largest, h_constant(rho, nu).h);
  }
  return make("h < 1 inside", largest < 1.0, Detail() << "max h " << largest);
}

CheckResult h_convex() {
  const double d = 0.05;
  double worst = -1.0;
  for (const double rho : grid(0.1, 0.9, 0.1)) {
    for (const double nu : grid(1.05, 1.95, d)) {
      const double mid = h_constant(rho, nu).h;
      const double avg = 0.5 * (h_constant(rho, nu - d).h + h_constant(rho, nu + d).h);
      worst = std::max(worst, mid - avg);
    }
  }
  return make("h convex in nu", worst <= 1e-9, Detail() << "max h - chord " << worst);
}

CheckResult h_forms_agree() {
  double worst = 0.0;
  for (const double rho : grid(0.1, 0.9, 0.1)) {
    for (const double nu : grid(1.1, 1.9, 0.1)) {
      worst = std::max(worst, std::abs(h_constant(rho, nu).h -
                                       h_constant(rho, nu, HMethod::PartialIntegration).h));
    }
  }
  return make("h f-form vs g-form", worst <= 1e-8, Detail() << "max diff " << worst);
}

CheckResult tail_forms_agree() {
  double worst = 0.0;
  for (const double rho : {0.3, 0.7}) {
    const QueueModel m = mpareto(rho);
    for (const double x : {1e3, 1e4}) {
      const double a = ros_tail_four_term(m, x);
      worst = std::max(worst, std::abs(ros_tail_single_integral(m, x) - a) / a);
    }
  }
  return make("four-term vs single-integral tail", worst <= 5e-3, Detail() << "max rel diff " << worst);
}

CheckResult small_s_slope() {
  const double rho = 0.7;
  const QueueModel m = mpareto(rho);
  const LstEvaluator e(m);
  const auto rv = m.service().regular_variation();
  const double target =
      m.arrival_rate() * rv->bingham_C * h_constant(rho, 1.5).h / (1.0 - rho);
  const double s = 1e-4;
  const double slope = e.wait_lst_ros_complement(s) / std::pow(s, 0.5);
  const double rel = std::abs(slope / target - 1.0);
  return make("small-s slope", rel <= 0.1,
              Detail() << "slope " << slope << " vs " << target << " at s=1e-4");
}

// experiments-cli

CheckResult config_round_trip() {
  ExperimentConfig cfg;
  cfg.model.service_kind = "pareto";
  cfg.model.service_params = {1.5, 1.0};
  cfg.model.load = 0.7;
  cfg.model.discipline = Discipline::RandomInsertion;
  cfg.run = {12345, 67, 89, 3};
  cfg.analysis.x_grid = {0.1, 1.0 / 3.0, 1e4};
  cfg.analysis.s_grid = {1e-4, 0.7};
  cfg.analysis.quantity = "busy-period";
  cfg.output_dir = "out dir";
  const bool ok = ExperimentConfig::parse(cfg.to_text()) == cfg;
  bool names_path = false;
  try {
    ExperimentConfig::load("/nonexistent/rosq.cfg");
  } catch (const ConfigError& e) {
    names_path = std::string(e.what()).find("/nonexistent/rosq.cfg") != std::string::npos;
  }
  return make("config round trip", ok && names_path,
              Detail() << "round trip " << ok << ", missing file names path " << names_path);
}

CheckResult round_trip_formatting() {
  Rng rng(13, Stream::Sampler);
  bool ok = true;
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.below(200)) - 100);
    ok = ok && std::stod(format_double(v)) == v;
  }
  return make("csv round-trip precision", ok, Detail() << "10000 values");
}

CheckResult determinism() {
  namespace fs = std::filesystem;
  ExperimentConfig cfg;
  cfg.model.service_kind = "pareto";
  cfg.model.service_params = {1.5, 1.0};
  cfg.model.load = 0.6;
  cfg.run.customers = 20000;
  cfg.run.warmup = 100;
  cfg.run.seed = 42;
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  const fs::path base = fs::temp_directory_path() / ("rosq-verify-" + std::to_string(stamp));
  std::ostringstream sink;
  std::string contents[2];
  bool header = true;
  for (int i = 0; i < 2; ++i) {
    RunContext ctx{(base / std::to_string(i)).string(), 1, &sink};
    cmd_simulate(cfg, ctx);
    std::ifstream f(fs::path(ctx.out_dir) / "customers.csv", std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    contents[i] = buf.str();
    header = header && contents[i].rfind("arrival_time,service_req,wait,workload,b_rp,z_rp\n", 0) == 0;
  }
  std::error_code ec;
  fs::remove_all(base, ec);
  const bool same = !contents[0].empty() && contents[0] == contents[1];
  return make("deterministic output", same && header,
              Detail() << contents[0].size() << " bytes, identical " << same << ", header " << header);
}

}  // namespace

std::vector<CheckResult> run_property_checks(std::size_t jobs) {
  (void)jobs;
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"quadrature linearity", quadrature_linearity},
      {"gamma recurrence", gamma_recurrence},
      {"bessel_k1 decreasing", bessel_monotone},
      {"root residual", root_residual},
      {"pareto forward tail", pareto_forward_tail},
      {"lst closed form vs quadrature", lst_consistency},
      {"bingham-doney ratio", bingham_doney},
      {"sampler KS", sampler_ks},
      {"pathwise discipline invariance", pathwise_invariance},
      {"mean wait invariance", mean_wait_invariance},
      {"lindley recursion under FCFS", lindley},
      {"B^rp <= W <= Z^rp", residual_bounds},
      {"busy-period accounting", busy_accounting},
      {"lst evaluators agree", lst_forms_agree},
      {"wait_lst_ros decreasing and convex", lst_monotone_convex},
      {"fcfs-composed form within 1e-4 + (1 + rho)(1 - rho)", heavy_traffic_identity},
      {"psi bound", psi_bound},
      {"h endpoints", h_endpoints},
      {"h < 1 inside", h_below_one},
      {"h convex in nu", h_convex},
      {"h f-form vs g-form", h_forms_agree},
      {"four-term vs single-integral tail", tail_forms_agree},
      {"small-s slope", small_s_slope},
      {"config round trip", config_round_trip},
      {"csv round-trip precision", round_trip_formatting},
      {"deterministic output", determinism},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : checks) {
    const auto start = std::chrono::steady_clock::now();
    try {
      results.push_back(fn());
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("threw: ") + e.what()});
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    results.back().detail += (Detail() << " [" << took.count() << " s]").str();
  }
  return results;
}

}  // namespace rosq
