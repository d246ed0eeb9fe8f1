#ifndef SCHEDCOMM_SCHED_HPP
#define SCHEDCOMM_SCHED_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace schedcomm {

/// Numbers of simultaneously served messages per class.
struct Schedule {
  std::vector<int> counts;

  Schedule() = default;
  explicit Schedule(std::vector<int> c) : counts(std::move(c)) {}

  std::size_t num_classes() const { return counts.size(); }
  int total() const;
  bool is_empty() const { return total() == 0; }
  int operator[](std::size_t j) const { return counts[j]; }

  bool operator==(const Schedule& o) const { return counts == o.counts; }
  /// True if this is a componentwise sub-schedule of s.
  bool dominated_by(const Schedule& s) const;
};

/// All schedules with 0 <= total <= K, in lexicographic order. The size of the
/// list is C(J + K, J).
std::vector<Schedule> enumerate_schedules(std::size_t J, int K);

/// Indices into `schedules` whose total is exactly K.
std::vector<std::size_t> full_schedule_indices(const std::vector<Schedule>& schedules, int K);

/// Componentwise min of the schedule and the per-class occupancy.
Schedule maximal_subschedule(const Schedule& s, const std::vector<int>& occupancy);

enum class PolicyKind { NonIdling, StateIndependent, SubclassStateIndependent };
enum class TieBreak { Renormalize, MaxWeight };

struct WeightedSchedule {
  Schedule s;
  double w = 0.0;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::StateIndependent;
  std::vector<WeightedSchedule> p;  // base distribution over schedules
  TieBreak tie_break = TieBreak::Renormalize;
  // Total quantum per schedule, aligned with `p`; consulted only by the
  // MaxWeight tie-break.
  std::vector<double> schedule_weight;

  void validate(std::size_t J, int K) const;
};

/// Pushforward of the base distribution through s -> maximal sub-schedule in
/// the given occupancy. Duplicate images are merged; weights sum to 1.
std::vector<WeightedSchedule> induced_distribution(const PolicySpec& policy,
                                                   const std::vector<int>& occupancy);

/// Schedule selection for the NonIdling and StateIndependent families.
/// NonIdling serves exactly K messages whenever at least K are present
/// (restricting the base distribution to feasible full schedules), and the
/// whole backlog otherwise.
Schedule choose_schedule(const PolicySpec& policy, const std::vector<int>& occupancy, int K,
                         std::mt19937_64& rng);

/// Per-class slice controls for one schedule s with codeword length n:
/// eta  - messages already partially served (0 < residual < n),
/// beta - fresh messages (residual == n),
/// zstar- min(s_j, queue length).
struct SubclassControls {
  std::vector<int> eta;
  std::vector<int> beta;
  std::vector<int> zstar;
  bool eta_nonempty() const;
};

SubclassControls subclass_controls(const std::vector<std::vector<std::int64_t>>& residuals,
                                   const Schedule& s, std::int64_t codeword_length);

/// Draw an index from non-negative weights (need not be normalized).
std::size_t sample_index(const std::vector<double>& weights, std::mt19937_64& rng);

}  // namespace schedcomm

#endif
