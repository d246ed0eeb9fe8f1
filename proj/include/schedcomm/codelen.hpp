#ifndef SCHEDCOMM_CODELEN_HPP
#define SCHEDCOMM_CODELEN_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "schedcomm/channel.hpp"
#include "schedcomm/exponents.hpp"
#include "schedcomm/sched.hpp"

namespace schedcomm {

/// One message class: alphabet size, tolerable decoding error probability and,
/// for Gaussian runs, the received SNR.
struct MessageClass {
  std::uint64_t alphabet_size = 2;
  double target_error = 1e-3;
  double snr = 0.0;

  void validate() const;
  double log_alphabet() const;
};

/// -ln p_e + rho ln M, the decoding work a message carries into the queue.
double service_requirement(const MessageClass& cls, RhoParam rho);

/// Smallest positive multiple of q that is >= x (and at least q).
double ceil_to_multiple(double x, double q);
/// The multiplier: ceil_to_multiple(x, q) / q as an integer.
std::int64_t ceil_multiple_count(double x, double q);

/// Raised when a decoding-error bound cannot be driven to the target by any
/// codeword length; names the offending subset or receiver pair.
class InfeasibleExponent : public std::runtime_error {
 public:
  InfeasibleExponent(std::string what, std::uint32_t subset)
      : std::runtime_error(std::move(what)), subset_mask(subset) {}
  std::uint32_t subset_mask;
};

/// Joint-decoding error bound chi for the active sources of a schedule, with
/// per-source message alphabets inflated to the M_j^{s_j} product alphabets.
/// Precomputes every subset exponent once.
class MacChiEvaluator {
 public:
  MacChiEvaluator(const DiscreteMac& ch, const InputDistribution& q,
                  const std::vector<MessageClass>& classes, const Schedule& s, RhoParam rho);

  /// chi over all non-empty subsets of the active sources.
  double chi(std::int64_t n) const;
  /// chi restricted to the non-empty subsets of `collection` (a bitmask over
  /// sources, which must be a subset of the active set).
  double chi_restricted(std::uint32_t collection, std::int64_t n) const;

  std::uint32_t active_mask() const { return active_; }
  std::int64_t bracket_lower(double p_e) const;
  std::int64_t bracket_upper(double p_e) const;
  /// Throws InfeasibleExponent if some subset exponent is not positive.
  void require_feasible() const;

  double subset_exponent(std::uint32_t subset) const;
  double subset_rate_nats(std::uint32_t subset) const;

 private:
  std::uint32_t active_ = 0;
  // for each non-empty subset mask of active sources (indexed by mask)
  std::vector<double> exponent_;   // E_{o,S}
  std::vector<double> rate_nats_;  // rho * sum_{j in S} s_j ln M_j
};

struct CodewordLengthResult {
  std::int64_t n = 1;
  std::int64_t bracket_lo = 1;
  std::int64_t bracket_hi = 1;
  double chi_at_n = 0.0;
  double chi_before = 0.0;  // chi(n-1); meaningful for n >= 2
  bool bracket_anomaly = false;
};

double chi_mac(const DiscreteMac& ch, const InputDistribution& q,
               const std::vector<MessageClass>& classes, const Schedule& s, RhoParam rho,
               std::int64_t n);

/// Smallest N with chi(N) <= p_e, bisected inside the analytic bracket.
CodewordLengthResult min_codeword_length_mac(const DiscreteMac& ch, const InputDistribution& q,
                                             const std::vector<MessageClass>& classes,
                                             const Schedule& s, RhoParam rho, double p_e);

/// Per-receiver error bound chi_j for successive decoding on the broadcast
/// cascade. If inflate_null is set, alphabets are computed with M_j + 1 so a
/// null value can stand in for a missing message.
class DbcChiEvaluator {
 public:
  DbcChiEvaluator(const DegradedBroadcastSpec& spec, const std::vector<MessageClass>& classes,
                  const Schedule& s, RhoParam rho, bool inflate_null = false);

  double chi(std::size_t receiver, std::int64_t n) const;
  std::int64_t bracket_lower(std::size_t receiver, double p_e) const;
  std::int64_t bracket_upper(std::size_t receiver, double p_e) const;
  void require_feasible(std::size_t receiver) const;
  std::size_t num_receivers() const { return exponent_.size(); }

 private:
  // exponent_[j][k - j] = E_{o, X_k, Y_j}; rate_nats_[k] = rho s_k ln M_k.
  std::vector<std::vector<double>> exponent_;
  std::vector<double> rate_nats_;
};

double chi_dbc(const DegradedBroadcastSpec& spec, const std::vector<MessageClass>& classes,
               const Schedule& s, RhoParam rho, std::size_t receiver, std::int64_t n);

struct DbcCodewordLengths {
  std::vector<std::int64_t> per_receiver;  // N_j(s); 0 when s_j = 0 (not decoded)
  std::int64_t overall = 0;                // max over decoded receivers
  std::vector<CodewordLengthResult> detail;
};

DbcCodewordLengths min_codeword_length_dbc(const DegradedBroadcastSpec& spec,
                                           const std::vector<MessageClass>& classes,
                                           const Schedule& s, RhoParam rho,
                                           bool inflate_null = false);

}  // namespace schedcomm

#endif
