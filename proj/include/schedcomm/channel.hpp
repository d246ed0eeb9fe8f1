#ifndef SCHEDCOMM_CHANNEL_HPP
#define SCHEDCOMM_CHANNEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace schedcomm {

// Tolerance for probability normalization checks. Construction fails on
// violation; nothing is silently re-normalized.
inline constexpr double kProbTol = 1e-12;

// x * ln(x) with the 0 ln 0 = 0 convention.
double xlogx(double x);

/// Single-input discrete memoryless channel p(y|x), row-major rows over y.
struct DiscreteChannel {
  std::size_t num_inputs = 0;
  std::size_t num_outputs = 0;
  std::vector<double> p;

  DiscreteChannel() = default;
  DiscreteChannel(std::size_t inputs, std::size_t outputs, std::vector<double> probs);

  double at(std::size_t x, std::size_t y) const { return p[x * num_outputs + y]; }
  std::span<const double> row(std::size_t x) const {
    return {p.data() + x * num_outputs, num_outputs};
  }

  static DiscreteChannel binary_symmetric(double crossover);
  static DiscreteChannel identity(std::size_t n);
};

/// Multiaccess channel with one input letter per source: p(y | x_1 .. x_J).
/// Joint inputs are mixed-radix indexed with source 0 most significant.
struct DiscreteMac {
  std::vector<std::size_t> input_sizes;
  std::size_t num_outputs = 0;
  std::vector<double> p;  // p[joint * num_outputs + y]

  DiscreteMac() = default;
  DiscreteMac(std::vector<std::size_t> inputs, std::size_t outputs, std::vector<double> probs);

  std::size_t num_sources() const { return input_sizes.size(); }
  std::size_t num_joint_inputs() const;
  double at(std::size_t joint, std::size_t y) const { return p[joint * num_outputs + y]; }

  std::size_t joint_index(std::span<const std::size_t> x) const;
  void decode_joint(std::size_t joint, std::span<std::size_t> x) const;

  /// y = x1 + x2 (+ ...) over binary inputs; output alphabet {0..J}.
  static DiscreteMac binary_adder(std::size_t sources);
  /// Independent per-source channels, output = tuple of per-source outputs.
  static DiscreteMac parallel(const std::vector<DiscreteChannel>& chans);
};

/// Per-source input distributions Q_j.
struct InputDistribution {
  std::vector<std::vector<double>> q;

  InputDistribution() = default;
  explicit InputDistribution(std::vector<std::vector<double>> dists);

  std::size_t num_sources() const { return q.size(); }
  static InputDistribution uniform(const std::vector<std::size_t>& sizes);
};

/// Broadcast cascade X_J -> ... -> X_1 -> Y_1 -> ... -> Y_J together with the
/// superposition ladder. All indices 0-based: class j here is class j+1 in
/// 1-based notation.
struct DegradedBroadcastSpec {
  std::vector<std::size_t> input_sizes;   // |X_0| .. |X_{J-1}|
  std::vector<std::size_t> output_sizes;  // |Y_0| .. |Y_{J-1}|
  DiscreteChannel first_hop;              // p(y_0 | x_0)
  // degradations[l] maps Y_l -> Y_{l+1}, for l = 0 .. J-2
  std::vector<DiscreteChannel> degradations;
  // ladder[j] is Q(x_j | x_{j+1}), input X_{j+1}, output X_j, for j = 0 .. J-2
  std::vector<DiscreteChannel> ladder;
  std::vector<double> top_marginal;  // Q over X_{J-1}

  std::size_t num_receivers() const { return input_sizes.size(); }
  void validate() const;

  /// Marginal distribution of X_k induced by the ladder.
  std::vector<double> input_marginal(std::size_t k) const;

  /// Two-receiver fixture: BSC(eps1) first hop, BSC(eps2) degradation,
  /// binary inputs, given ladder kernel rows {q(x0|x1=0), q(x0|x1=1)}.
  static DegradedBroadcastSpec binary_cascade(double eps1, double eps2,
                                              const std::vector<double>& ladder_rows,
                                              const std::vector<double>& top);
};

/// SNR description of a Gaussian multiaccess channel; snr[j] = P_j / (N_0 W).
struct GaussianMacSpec {
  std::vector<double> snr;

  GaussianMacSpec() = default;
  explicit GaussianMacSpec(std::vector<double> snrs);
  std::size_t num_classes() const { return snr.size(); }
};

/// One linear constraint of a multiaccess rate region:
/// sum of r_j over sources in `subset` (bitmask, bit j = source j) <= bound.
struct RateConstraint {
  std::uint32_t subset = 0;
  double bound = 0.0;
};

/// I(X;Y) in nats for input distribution q.
double mutual_information(const DiscreteChannel& ch, const std::vector<double>& q);

/// I(X(S); Y | X(S^c)) in nats under the product distribution Q.
/// `subset` is a non-empty bitmask over sources.
double mac_conditional_mi(const DiscreteMac& ch, const InputDistribution& q,
                          std::uint32_t subset);

/// Effective single-user channel from X_k to Y_j: ladder levels below k are
/// marginalized out, then the first hop and the first j degradation stages are
/// composed. Requires k >= j.
DiscreteChannel dbc_effective_channel(const DegradedBroadcastSpec& spec, std::size_t k,
                                      std::size_t j);

/// All 2^J - 1 constraints of the multiaccess pentagon for the distribution Q.
std::vector<RateConstraint> mac_pentagon(const DiscreteMac& ch, const InputDistribution& q);

/// I(X_k; Y_j | X_{k+1}) on the broadcast cascade (unconditional for the top
/// level k = J-1). Requires k >= j.
double dbc_conditional_mi(const DegradedBroadcastSpec& spec, std::size_t k, std::size_t j);

/// Per-receiver bounds r_j <= I(X_j; Y_j | X_{j+1}), top level unconditional.
std::vector<double> dbc_rate_constraints(const DegradedBroadcastSpec& spec);

}  // namespace schedcomm

#endif
