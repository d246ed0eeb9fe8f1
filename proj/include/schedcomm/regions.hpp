#ifndef SCHEDCOMM_REGIONS_HPP
#define SCHEDCOMM_REGIONS_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "schedcomm/channel.hpp"
#include "schedcomm/codelen.hpp"
#include "schedcomm/exponents.hpp"
#include "schedcomm/sched.hpp"

namespace schedcomm {

/// Feasible iff coeff . EA < rhs (strict).
struct LinearBound {
  std::vector<double> coeff;
  double rhs = 0.0;

  double evaluate(const std::vector<double>& ea) const;
  bool satisfied(const std::vector<double>& ea) const { return evaluate(ea) < rhs; }
  /// Largest t with coeff . (t * dir) = rhs; +inf when the direction is free.
  double threshold_scale(const std::vector<double>& dir) const;
};

/// Both sufficient stability conditions for the full-service policy family.
struct NonIdlingBounds {
  LinearBound per_symbol;  // sum_j EA_j ceil(S_j / phi_lo_j) < K
  LinearBound workload;    // sum_j EA_j (S_j + phi_hi_j) < min full-schedule quantum
  std::vector<double> phi_lo;  // min over full schedules with s_j > 0
  std::vector<double> phi_hi;  // max over all schedules

  /// Largest stable scaling of a direction covered by either condition.
  double inner_scale(const std::vector<double>& dir) const;
};

NonIdlingBounds nonidling_inner_bounds(const std::vector<double>& service_req,
                                       const QuantaTable& quanta, int K);

/// Instability holds when sum_{j in B} S_j EA_j >= rhs, with rhs the best
/// full-schedule quantum total over B.
LinearBound nonidling_transience_bound(const std::vector<double>& service_req,
                                       const QuantaTable& quanta, int K,
                                       std::uint32_t subset_mask);

/// Per-class thresholds sum_s p(s) s_j phi_j(s) / (S_j + phi_hi_j).
std::vector<double> state_independent_thresholds(const std::vector<double>& service_req,
                                                 const QuantaTable& quanta,
                                                 const PolicySpec& policy);

struct JointRegion {
  std::vector<double> class_threshold;          // sum_s p(s) s_j / N(s)
  std::vector<std::vector<double>> generators;  // r(s) rows, aligned with support
};

JointRegion joint_region(const std::vector<WeightedSchedule>& support,
                         const std::vector<std::int64_t>& codeword_length,
                         std::size_t num_classes);

/// Rate vectors r_j(s) = s_j / N(s) for every schedule of the list.
std::vector<std::vector<double>> joint_rate_vectors(const std::vector<Schedule>& schedules,
                                                    const std::vector<std::int64_t>& lengths);

struct MembershipResult {
  bool inside = false;
  double mass = 0.0;                // least total weight covering the point
  std::vector<double> weights;      // per generator, when inside
  std::vector<double> certificate;  // separating prices, when outside
};

/// Is there a sub-probability vector pi with sum_s pi_s r(s) >= ea?
MembershipResult outer_membership(const std::vector<double>& ea,
                                  const std::vector<std::vector<double>>& generators);

class BoundaryRefusal : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct SynthesizedPolicy {
  std::vector<double> weights;          // p over the generators, sums to 1
  std::vector<double> class_threshold;  // sum_s p_s r_j(s)
  double slack = 0.0;                   // min over loaded classes of relative margin
};

/// A distribution over the generators whose induced per-class thresholds
/// strictly dominate ea. Refuses boundary and exterior points.
SynthesizedPolicy synthesize_policy(const std::vector<double>& ea,
                                    const std::vector<std::vector<double>>& generators);

/// s_j ln(1 + snr_j / (sum_i s_i snr_i - snr_j + 1)), per class.
std::vector<double> interference_limited_caps(const GaussianMacSpec& spec, const Schedule& s);

/// K ln(1 + snr/((K-1) snr + 1)).
double single_user_capacity_limit(double snr, int K);

/// rho / (1 + rho).
double saturation_constant(double rho);

/// Nat arrival rates ln(M_j) * EA_j.
std::vector<double> nat_rates(const std::vector<MessageClass>& classes,
                              const std::vector<double>& ea);

/// The asymptotic capacity picture of a Gaussian system at one schedule.
struct AsymptoticCaps {
  std::vector<double> interference_limited;  // per class at the schedule
  double single_user_limit = 0.0;            // class-0 snr, K lone slots
  double saturation = 0.0;                   // rho/(1+rho)
  double spectral_limit = 1.0;               // nat/s/Hz ceiling
};

AsymptoticCaps asymptotic_caps(const GaussianMacSpec& spec, const Schedule& s, int K,
                               double rho);

/// Strict membership of a rate vector in a pentagon constraint set.
bool inside_pentagon(const std::vector<RateConstraint>& constraints,
                     const std::vector<double>& rates);

/// Strict membership against per-class bounds.
bool inside_component_bounds(const std::vector<double>& bounds,
                             const std::vector<double>& rates);

struct ScheduleForRate {
  Schedule s;
  std::int64_t codeword_length = 0;
  std::vector<double> achieved;  // R_j(s) = s_j ln M_j / N(s)
};

/// The scaling construction: s_j = ceil(A (r_j + eps) / ln M_j), with the
/// codeword length solved for the resulting schedule.
ScheduleForRate schedule_for_target_rate(const DiscreteMac& ch, const InputDistribution& q,
                                         const std::vector<double>& target, double eps,
                                         const std::vector<MessageClass>& classes,
                                         RhoParam rho, double p_e, double scale_nats);

/// Nat arrival rate threshold K ln M / ceil(S / phi_lo) for one class under
/// full-service scheduling.
double single_class_nat_threshold(double log_alphabet, double service_req, double phi_lo,
                                  int K);

/// The same threshold in the large-alphabet regime, where the service
/// requirement is dominated by rho ln M.
double spectral_nat_threshold(double snr, int K, double rho, double log_alphabet);

}  // namespace schedcomm

#endif
