#include "rosq/desim.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <limits>
#include <sstream>

#include "rosq/parallel.hpp"

namespace rosq {

std::string to_string(Discipline d) {
  switch (d) {
    case Discipline::FCFS: return "fcfs";
    case Discipline::ROS: return "ros";
    case Discipline::RandomInsertion: return "random-insertion";
  }
  return {};
}

Discipline parse_discipline(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "fcfs") return Discipline::FCFS;
  if (s == "ros") return Discipline::ROS;
  if (s == "random-insertion" || s == "randominsertion") return Discipline::RandomInsertion;
  throw ConfigError("unknown discipline '" + name + "'");
}

QueueModel::QueueModel(TailDistribution arrival, TailDistribution service,
                       Discipline discipline)
    : arrival_(arrival), service_(service), discipline_(discipline) {
  const double rho = load();
  if (!(rho < 1.0)) {
    std::ostringstream msg;
    msg << "unstable model: load " << rho << " >= 1";
    throw StabilityError(msg.str());
  }
}

QueueModel QueueModel::with_discipline(Discipline d) const {
  return {arrival_, service_, d};
}

QueueModel QueueModel::with_load(double rho) const {
  if (!(rho > 0.0 && rho < 1.0)) {
    std::ostringstream msg;
    msg << "load must lie in (0, 1), got " << rho;
    throw StabilityError(msg.str());
  }
  const double factor = service_.mean() / (rho * arrival_.mean());
  return {arrival_.scaled(factor), service_, discipline_};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Waiting customers, identified by index into the busy-period buffer.
class WaitingRoom {
 public:
  WaitingRoom(Discipline d, Rng& rng) : discipline_(d), rng_(rng) {}

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  void push(std::size_t id) {
    if (discipline_ == Discipline::RandomInsertion) {
      // Served from the back; a uniform position among n+1 slots.
      const auto pos = rng_.below(items_.size() + 1);
      items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(pos), id);
    } else {
      items_.push_back(id);
    }
  }

  std::size_t pop() {
    std::size_t id = 0;
    switch (discipline_) {
      case Discipline::FCFS:
        id = items_.front();
        items_.pop_front();
        break;
      case Discipline::ROS: {
        const auto pick = rng_.below(items_.size());
        id = items_[pick];
        items_[pick] = items_.back();
        items_.pop_back();
        break;
      }
      case Discipline::RandomInsertion:
        id = items_.back();
        items_.pop_back();
        break;
    }
    return id;
  }

 private:
  Discipline discipline_;
  Rng& rng_;
  std::deque<std::size_t> items_;
};

}  // namespace

RunSummary simulate_stream(const QueueModel& model, std::uint64_t n,
                           std::uint64_t warmup, std::uint64_t seed,
                           SimSink& sink) {
  if (n <= warmup) {
    std::ostringstream msg;
    msg << "customer count " << n << " must exceed warmup " << warmup;
    throw ConfigError(msg.str());
  }
  Rng arrivals(seed, Stream::Arrivals);
  Rng services(seed, Stream::Services);
  Rng choices(seed, Stream::Discipline);
  WaitingRoom room(model.discipline(), choices);
  std::deque<double> drawn;  // service requirements not yet started

  const std::uint64_t target = n - warmup;
  RunSummary summary;

  std::vector<CustomerRecord> buffer;  // current busy period
  std::vector<bool> buffer_recorded;
  double bp_start = 0.0;
  bool busy = false;
  bool recording_bp = false;  // current busy period lies in the window
  bool window_open = false;

  double t_arrival = model.arrival().sample(arrivals);
  double t_departure = kInf;
  double clear_time = 0.0;  // time the server would empty without arrivals
  std::uint64_t next_index = 0;

  double wait_sum = 0.0;
  double workload_sum = 0.0;
  double queue_area = 0.0;
  double last_event = 0.0;

  auto start_service = [&](std::size_t id, double t) {
    auto& rec = buffer[id];
    rec.service_start = t;
    rec.wait = t - rec.arrival_time;
    rec.service_req = drawn.front();
    drawn.pop_front();
    rec.departure = t + rec.service_req;
    t_departure = rec.departure;
  };

  while (true) {
    const bool departure_next = t_departure <= t_arrival;
    const double t = departure_next ? t_departure : t_arrival;
    if (window_open && recording_bp) queue_area += static_cast<double>(room.size()) * (t - last_event);
    last_event = t;

    if (departure_next) {
      if (!room.empty()) {
        start_service(room.pop(), t);
        continue;
      }
      // Busy period ends.
      busy = false;
      t_departure = kInf;
      if (recording_bp) {
        for (std::size_t i = 0; i < buffer.size(); ++i) {
          auto& rec = buffer[i];
          rec.z_rp = i == 0 ? 0.0 : t - rec.arrival_time;
          if (buffer_recorded[i]) {
            wait_sum += rec.wait;
            sink.customer(rec);
          }
        }
        BusyPeriodRecord bp{bp_start, t - bp_start, buffer.size()};
        sink.busy_period(bp);
        ++summary.busy_periods;
        summary.customers_served += buffer.size();
        if (summary.recorded == target) {
          summary.window_end = t;
          break;
        }
      }
      buffer.clear();
      buffer_recorded.clear();
      continue;
    }

    // Arrival.
    const std::uint64_t index = next_index++;
    CustomerRecord rec;
    rec.index = index;
    rec.arrival_time = t;
    rec.workload = std::max(clear_time - t, 0.0);
    rec.b_rp = busy ? t_departure - t : 0.0;
    const double req = model.service().sample(services);
    drawn.push_back(req);
    clear_time = std::max(clear_time, t) + req;
    t_arrival = t + model.arrival().sample(arrivals);

    if (!busy) {
      busy = true;
      bp_start = t;
      if (!window_open && index >= warmup) {
        window_open = true;
        summary.window_start = t;
      }
      recording_bp = window_open && summary.recorded < target;
      buffer.push_back(rec);
      buffer_recorded.push_back(false);
      start_service(0, t);
    } else {
      buffer.push_back(rec);
      buffer_recorded.push_back(false);
      room.push(buffer.size() - 1);
    }
    if (recording_bp && summary.recorded < target) {
      buffer_recorded.back() = true;
      ++summary.recorded;
      workload_sum += rec.workload;
    }
  }
  const auto count = static_cast<double>(summary.recorded);
  summary.mean_wait = wait_sum / count;
  summary.mean_workload = workload_sum / count;
  const double span = summary.window_end - summary.window_start;
  summary.mean_queue_length = span > 0.0 ? queue_area / span : 0.0;
  summary.little_rhs = model.arrival_rate() * summary.mean_wait;
  return summary;
}

namespace {

class CollectingSink : public SimSink {
 public:
  explicit CollectingSink(SimRun& run) : run_(run) {}
  void customer(const CustomerRecord& r) override { run_.customers.push_back(r); }
  void busy_period(const BusyPeriodRecord& b) override { run_.busy_periods.push_back(b); }

 private:
  SimRun& run_;
};

}  // namespace

SimRun simulate(const QueueModel& model, std::uint64_t n, std::uint64_t warmup,
                std::uint64_t seed) {
  SimRun run{model, seed, n, warmup, {}, {}, {}};
  if (n > warmup) run.customers.reserve(n - warmup);
  CollectingSink sink(run);
  run.summary = simulate_stream(model, n, warmup, seed, sink);
  return run;
}

std::vector<double> simulate_conditional_wq(const QueueModel& model,
                                            std::uint64_t q,
                                            std::uint64_t replications,
                                            std::uint64_t seed,
                                            std::size_t jobs) {
  if (q == 0) throw DomainError("conditional waiting time needs q >= 1");
  if (model.discipline() != Discipline::ROS) {
    throw ConfigError("conditional waiting time is defined for ROS only");
  }
  std::vector<double> out(replications);
  parallel_for(replications, jobs, [&](std::size_t i) {
    Rng rng(seed, Stream::Replication, i);
    // Only the count of other waiting customers matters; the tagged one is
    // selected with probability 1/n at each service start.
    std::uint64_t waiting = q;
    double t = 0.0;
    double next_arrival = model.arrival().sample(rng);
    while (rng.below(waiting) != 0) {
      --waiting;
      t += model.service().sample(rng);
      while (next_arrival < t) {
        ++waiting;
        next_arrival += model.arrival().sample(rng);
      }
    }
    out[i] = t;
  });
  return out;
}

}  // namespace rosq
