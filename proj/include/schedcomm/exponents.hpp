#ifndef SCHEDCOMM_EXPONENTS_HPP
#define SCHEDCOMM_EXPONENTS_HPP

#include <cstdint>
#include <functional>
#include <unordered_map>

#include "schedcomm/channel.hpp"
#include "schedcomm/sched.hpp"

namespace schedcomm {

/// Gallager parameter, restricted to (0, 1]. The rho -> 0 limit is reached
/// only through e0_over_rho_limit.
struct RhoParam {
  double value;
  explicit RhoParam(double rho);
};

/// E0(rho, Q) = -ln sum_y [ sum_x Q(x) p(y|x)^{1/(1+rho)} ]^{1+rho}.
double e0_single(const DiscreteChannel& ch, const std::vector<double>& q, RhoParam rho);

/// The single-user channel seen by one class-j codeletter under schedule s:
/// the multiaccess law averaged over the other s_j - 1 same-class letters and
/// all other scheduled classes' letters. The one-letter-per-source law only
/// supports s_j <= 1 per class; larger counts are rejected.
DiscreteChannel effective_mac_channel(const DiscreteMac& ch, const InputDistribution& q,
                                      const Schedule& s, std::size_t j);

/// E0 of the effective channel above. Requires s_j > 0.
double e0_independent(const DiscreteMac& ch, const InputDistribution& q, const Schedule& s,
                      std::size_t j, RhoParam rho);

/// Closed form for Gaussian codebooks:
/// rho * ln(1 + snr_j / ((1+rho) * (sum_k s_k snr_k - snr_j + 1))).
double e0_gaussian_quantum(const GaussianMacSpec& spec, const Schedule& s, std::size_t j,
                           RhoParam rho);

/// E0 for joint decoding of the sources in `subset` (bitmask), with the
/// complement's letters known at the decoder:
/// -ln sum_{x(S^c)} Q_{S^c} sum_y [ sum_{x(S)} Q_S p(y|x)^{1/(1+rho)} ]^{1+rho}.
double e0_mac_subset(const DiscreteMac& ch, const InputDistribution& q, std::uint32_t subset,
                     RhoParam rho);

/// Successive-decoding exponent of source k at receiver j on the broadcast
/// cascade; levels above k are averaged over the ladder. Requires k >= j.
double e0_dbc(const DegradedBroadcastSpec& spec, std::size_t k, std::size_t j, RhoParam rho);

struct RhoLimitResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// lim_{rho->0} E0(rho)/rho by Richardson extrapolation on the geometric grid
/// {1e-1, ..., 1e-6}. Throws if the extrapolation does not settle, which
/// indicates a broken exponent implementation.
RhoLimitResult e0_over_rho_limit(const std::function<double(double)>& e0_of_rho);

/// Service quantum phi_j(s) for every schedule in S_K (phi = 0 when s_j = 0).
struct QuantaTable {
  std::vector<Schedule> schedules;
  std::vector<std::vector<double>> phi;  // [schedule][class]
  int K = 0;

  double phi_of(const Schedule& s, std::size_t j) const;
  std::size_t index_of(const Schedule& s) const;
  const std::vector<double>& row(const Schedule& s) const;
  double total_quantum(std::size_t idx) const;

  static QuantaTable gaussian(const GaussianMacSpec& spec, int K, RhoParam rho);
  /// Discrete multiaccess quanta; schedules with any count above 1 get NaN
  /// entries since the one-letter law does not define them.
  static QuantaTable discrete(const DiscreteMac& ch, const InputDistribution& q, int K,
                              RhoParam rho);

 private:
  std::unordered_map<std::uint64_t, std::size_t> index_;
  void build_index();
};

}  // namespace schedcomm

#endif
