#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rosq/distributions.hpp"

namespace rosq {

enum class Discipline { FCFS, ROS, RandomInsertion };

std::string to_string(Discipline d);
/// Accepts "fcfs", "ros", "random-insertion" (case-insensitive).
Discipline parse_discipline(const std::string& name);

/// GI/G/1 queue. Construction fails with StabilityError unless load < 1.
class QueueModel {
 public:
  QueueModel(TailDistribution arrival, TailDistribution service,
             Discipline discipline);

  const TailDistribution& arrival() const noexcept { return arrival_; }
  const TailDistribution& service() const noexcept { return service_; }
  Discipline discipline() const noexcept { return discipline_; }
  double load() const noexcept { return service_.mean() / arrival_.mean(); }
  double arrival_rate() const noexcept { return 1.0 / arrival_.mean(); }
  bool poisson_arrivals() const noexcept {
    return arrival_.kind() == DistKind::Exponential;
  }
  QueueModel with_discipline(Discipline d) const;
  /// Same service law, arrival law rescaled so that load() == rho.
  QueueModel with_load(double rho) const;

 private:
  TailDistribution arrival_;
  TailDistribution service_;
  Discipline discipline_;
};

struct CustomerRecord {
  std::uint64_t index = 0;  // arrival order, counting warmup customers
  double arrival_time = 0.0;
  double service_req = 0.0;
  double service_start = 0.0;
  double departure = 0.0;
  double wait = 0.0;
  double workload = 0.0;  // V seen at arrival
  double b_rp = 0.0;      // residual service of the customer in service
  double z_rp = 0.0;      // residual busy period; 0 on arrival to an empty system
};

struct BusyPeriodRecord {
  double start = 0.0;
  double length = 0.0;
  std::uint64_t customers_served = 0;
};

struct RunSummary {
  std::uint64_t recorded = 0;
  std::uint64_t busy_periods = 0;
  std::uint64_t customers_served = 0;  // all customers of the recorded busy periods
  double window_start = 0.0;
  double window_end = 0.0;
  double mean_wait = 0.0;
  double mean_workload = 0.0;
  /// Time-average number waiting over the window, and arrival rate times
  /// mean wait. Little's law makes them agree for long windows.
  double mean_queue_length = 0.0;
  double little_rhs = 0.0;
};

struct SimRun {
  QueueModel model;
  std::uint64_t seed = 0;
  std::uint64_t n_customers = 0;
  std::uint64_t warmup = 0;
  std::vector<CustomerRecord> customers;
  std::vector<BusyPeriodRecord> busy_periods;
  RunSummary summary;
};

/// Receives records as a run produces them. Customers of a busy period are
/// delivered in arrival order when that busy period ends.
class SimSink {
 public:
  virtual ~SimSink() = default;
  virtual void customer(const CustomerRecord&) {}
  virtual void busy_period(const BusyPeriodRecord&) {}
};

/// Event-driven run. Customers 0..warmup-1 are discarded; recording starts
/// at the first busy period begun by a customer with index >= warmup and
/// covers exactly n - warmup customers. The run then continues until the
/// busy period of the last recorded customer ends.
///
/// Arrivals, service requirements and discipline choices use separate
/// streams. The k-th service requirement drawn is given to the k-th
/// customer to enter service, so the server's timeline is identical across
/// disciplines for a common seed; under FCFS each customer keeps the
/// requirement drawn at its own arrival.
RunSummary simulate_stream(const QueueModel& model, std::uint64_t n,
                           std::uint64_t warmup, std::uint64_t seed,
                           SimSink& sink);

SimRun simulate(const QueueModel& model, std::uint64_t n, std::uint64_t warmup,
                std::uint64_t seed);

/// Waiting time of a tagged customer in an ROS queue that starts with q
/// waiting customers and an idle server, with a fresh arrival stream.
/// Replication i uses its own generator, so the sample does not depend on
/// `jobs`.
std::vector<double> simulate_conditional_wq(const QueueModel& model,
                                            std::uint64_t q,
                                            std::uint64_t replications,
                                            std::uint64_t seed,
                                            std::size_t jobs = 1);

}  // namespace rosq
