#ifndef SCHEDCOMM_QSIM_HPP
#define SCHEDCOMM_QSIM_HPP

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "schedcomm/codelen.hpp"
#include "schedcomm/exponents.hpp"
#include "schedcomm/sched.hpp"

namespace schedcomm {

enum class Mode { Independent, Joint, Dbc };
enum class BatchKind { Poisson, Bernoulli, DeterministicCycle };

// Residuals below this are treated as completed in the real-valued service
// bookkeeping; quanta and requirements are O(0.1..10) nats, eleven orders
// larger.
inline constexpr double kResidualTol = 1e-12;
// Safety rail on batch sizes per slot.
inline constexpr int kMaxBatch = 1000000;

struct ArrivalModel {
  BatchKind kind = BatchKind::Poisson;
  std::vector<double> rates;  // mean arrivals per slot, per class
  // Joint/Dbc: split[j][i] is the probability that a class-j arrival is
  // stamped with support schedule i. Must put no mass where s_j = 0.
  std::vector<std::vector<double>> split;
};

struct SimConfig {
  Mode mode = Mode::Independent;
  std::size_t num_classes = 0;
  int K = 1;

  // Independent mode
  QuantaTable quanta;
  std::vector<double> service_req;  // S_j in nats
  PolicySpec policy;                // NonIdling or StateIndependent

  // Joint / Dbc mode: policy.p doubles as the support of the subclass
  // state-independent policy; codeword_length[i] = N(s_i) aligned with it.
  std::vector<std::int64_t> codeword_length;

  ArrivalModel arrivals;
  std::int64_t horizon = 200000;
  std::uint64_t seed = 1;
  std::size_t replications = 8;

  void validate() const;
  double mean_arriving_work() const;
};

struct StabilityVerdict {
  enum class Label { Stable, Unstable, Inconclusive };
  Label label = Label::Inconclusive;
  double slope = 0.0;        // residual work per slot, second half
  double mean_queue = 0.0;   // mean total messages, second half
  double mean_queue_ci = 0.0;
};

const char* to_string(StabilityVerdict::Label label);

struct SimReport {
  std::uint64_t seed = 0;
  std::size_t replication = 0;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> n_series;  // total messages at each slot end
  std::vector<double> work_series;     // total residual work at each slot end
  std::vector<std::vector<std::int64_t>> sojourns;  // per class, in slots
  std::int64_t empty_visits = 0;
  std::int64_t empty_visits_second_half = 0;
  double mean_arriving_work = 0.0;
  // in-run audits: per-slot work decrease never exceeds the action's quantum
  // total, and each subclass slice keeps at most one partially served cohort
  bool work_audit_ok = true;
  bool cohort_audit_ok = true;
  // joint/dbc: arrivals stamped per (class, support schedule)
  std::vector<std::vector<std::int64_t>> subclass_arrivals;
  StabilityVerdict verdict;
};

/// Least-squares slope over the second half plus the empty-state visit rate
/// decide the label; the slope tolerance is 0.01 x mean arriving work per
/// slot and "visited the empty state" means a rate of at least 1e-4.
StabilityVerdict classify_series(const std::vector<double>& work_series,
                                 const std::vector<std::int64_t>& n_series,
                                 std::int64_t empty_visits_second_half,
                                 double mean_arriving_work);

struct ClassSojournStats {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double ci_halfwidth = 0.0;  // batch-means 95% CI on the mean
  bool flagged = false;       // too few departures for the statistics to mean much
};

std::vector<ClassSojournStats> sojourn_stats(const SimReport& report);

/// One replication, fully determined by (config.seed, replication index).
SimReport run_replication(const SimConfig& config, std::size_t replication);

/// All replications (parallel across workers, deterministic per index).
std::vector<SimReport> run(const SimConfig& config);

/// Deterministic sub-stream derivation for (seed, replication, subsystem).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t tag);

/// Portable batch-size sampler; DeterministicCycle ignores the rng and emits
/// floor(rate*(slot+1)) - floor(rate*slot).
int sample_batch(BatchKind kind, double rate, std::mt19937_64& rng, std::int64_t slot);

/// Splitting distribution mu over the support schedules: mass of schedule i
/// for class j proportional to p(i) * s_j / N(s_i).
std::vector<std::vector<double>> default_split(const std::vector<WeightedSchedule>& support,
                                               const std::vector<std::int64_t>& codeword_length,
                                               std::size_t num_classes);

}  // namespace schedcomm

#endif
