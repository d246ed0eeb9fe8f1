#include "schedcomm/codelen.hpp"

#include <algorithm>
#include <cmath>

namespace schedcomm {

void MessageClass::validate() const {
  if (alphabet_size < 2) throw std::invalid_argument("MessageClass: alphabet size < 2");
  if (!(target_error > 0.0) || !(target_error < 1.0)) {
    throw std::invalid_argument("MessageClass: target error outside (0,1)");
  }
}

double MessageClass::log_alphabet() const {
  return std::log(static_cast<double>(alphabet_size));
}

double service_requirement(const MessageClass& cls, RhoParam rho) {
  cls.validate();
  return -std::log(cls.target_error) + rho.value * cls.log_alphabet();
}

std::int64_t ceil_multiple_count(double x, double q) {
  if (!(x > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument("ceil_multiple_count: need x > 0 and q > 0");
  }
  // The 1e-12 slack keeps exact multiples from rounding one step up.
  const auto n = static_cast<std::int64_t>(std::ceil(x / q - 1e-12));
  return std::max<std::int64_t>(n, 1);
}

double ceil_to_multiple(double x, double q) {
  return static_cast<double>(ceil_multiple_count(x, q)) * q;
}

namespace {

std::string subset_to_string(std::uint32_t mask) {
  std::string s = "{";
  bool first = true;
  for (std::uint32_t j = 0; mask >> j; ++j) {
    if (mask & (1u << j)) {
      if (!first) s += ",";
      s += std::to_string(j);
      first = false;
    }
  }
  return s + "}";
}

// Minimal n in [lo, hi] (found by bisection) with bound(n) <= p_e, expanding
// past hi when the analytic bracket turns out not to contain the answer.
CodewordLengthResult search_min_length(const std::function<double(std::int64_t)>& bound,
                                       std::int64_t lo, std::int64_t hi, double p_e) {
  CodewordLengthResult res;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  if (hi < lo) {
    res.bracket_anomaly = true;
    hi = lo;
  }
  while (bound(hi) > p_e) {
    res.bracket_anomaly = true;
    lo = hi + 1;
    hi = hi * 2;
  }
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (bound(mid) <= p_e) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  res.n = lo;
  res.chi_at_n = bound(lo);
  res.chi_before = bound(lo - 1);
  return res;
}

}  // namespace

MacChiEvaluator::MacChiEvaluator(const DiscreteMac& ch, const InputDistribution& q,
                                 const std::vector<MessageClass>& classes, const Schedule& s,
                                 RhoParam rho) {
  const std::size_t J = ch.num_sources();
  if (classes.size() != J || s.num_classes() != J) {
    throw std::invalid_argument("MacChiEvaluator: dimension mismatch");
  }
  for (std::size_t j = 0; j < J; ++j) {
    if (s.counts[j] > 0) active_ |= (1u << j);
  }
  if (active_ == 0) throw std::invalid_argument("MacChiEvaluator: empty schedule");
  const std::uint32_t top = 1u << J;
  exponent_.assign(top, 0.0);
  rate_nats_.assign(top, 0.0);
  for (std::uint32_t mask = active_;; mask = (mask - 1) & active_) {
    if (mask != 0) {
      exponent_[mask] = e0_mac_subset(ch, q, mask, rho);
      double rate = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        if (mask & (1u << j)) {
          classes[j].validate();
          rate += s.counts[j] * classes[j].log_alphabet();
        }
      }
      rate_nats_[mask] = rho.value * rate;
    }
    if (mask == 0) break;
  }
}

double MacChiEvaluator::chi(std::int64_t n) const { return chi_restricted(active_, n); }

double MacChiEvaluator::chi_restricted(std::uint32_t collection, std::int64_t n) const {
  if ((collection & ~active_) != 0) {
    throw std::invalid_argument("chi_restricted: collection must be active sources");
  }
  if (collection == 0) throw std::invalid_argument("chi_restricted: empty collection");
  double total = 0.0;
  for (std::uint32_t mask = collection;; mask = (mask - 1) & collection) {
    if (mask != 0) {
      total += std::exp(rate_nats_[mask] - static_cast<double>(n) * exponent_[mask]);
    }
    if (mask == 0) break;
  }
  return total;
}

std::int64_t MacChiEvaluator::bracket_lower(double p_e) const {
  std::int64_t best = 1;
  for (std::uint32_t mask = active_;; mask = (mask - 1) & active_) {
    if (mask != 0) {
      best = std::max(best,
                      ceil_multiple_count(-std::log(p_e) + rate_nats_[mask], exponent_[mask]));
    }
    if (mask == 0) break;
  }
  return best;
}

std::int64_t MacChiEvaluator::bracket_upper(double p_e) const {
  std::size_t terms = 0;
  for (std::uint32_t mask = active_;; mask = (mask - 1) & active_) {
    if (mask != 0) ++terms;
    if (mask == 0) break;
  }
  std::int64_t best = 1;
  const double shrunk = p_e / static_cast<double>(terms);
  for (std::uint32_t mask = active_;; mask = (mask - 1) & active_) {
    if (mask != 0) {
      best = std::max(best,
                      ceil_multiple_count(-std::log(shrunk) + rate_nats_[mask], exponent_[mask]));
    }
    if (mask == 0) break;
  }
  return best;
}

void MacChiEvaluator::require_feasible() const {
  for (std::uint32_t mask = active_;; mask = (mask - 1) & active_) {
    if (mask != 0 && !(exponent_[mask] > 0.0)) {
      throw InfeasibleExponent("joint decoding bound cannot reach the target: subset " +
                                   subset_to_string(mask) + " has non-positive exponent",
                               mask);
    }
    if (mask == 0) break;
  }
}

double MacChiEvaluator::subset_exponent(std::uint32_t subset) const {
  return exponent_[subset];
}

double MacChiEvaluator::subset_rate_nats(std::uint32_t subset) const {
  return rate_nats_[subset];
}

double chi_mac(const DiscreteMac& ch, const InputDistribution& q,
               const std::vector<MessageClass>& classes, const Schedule& s, RhoParam rho,
               std::int64_t n) {
  return MacChiEvaluator(ch, q, classes, s, rho).chi(n);
}

CodewordLengthResult min_codeword_length_mac(const DiscreteMac& ch, const InputDistribution& q,
                                             const std::vector<MessageClass>& classes,
                                             const Schedule& s, RhoParam rho, double p_e) {
  if (!(p_e > 0.0) || !(p_e < 1.0)) {
    throw std::invalid_argument("min_codeword_length_mac: p_e outside (0,1)");
  }
  MacChiEvaluator eval(ch, q, classes, s, rho);
  eval.require_feasible();
  return search_min_length([&](std::int64_t n) { return eval.chi(n); },
                           eval.bracket_lower(p_e), eval.bracket_upper(p_e), p_e);
}

DbcChiEvaluator::DbcChiEvaluator(const DegradedBroadcastSpec& spec,
                                 const std::vector<MessageClass>& classes, const Schedule& s,
                                 RhoParam rho, bool inflate_null) {
  const std::size_t J = spec.num_receivers();
  if (classes.size() != J || s.num_classes() != J) {
    throw std::invalid_argument("DbcChiEvaluator: dimension mismatch");
  }
  exponent_.resize(J);
  rate_nats_.assign(J, 0.0);
  for (std::size_t k = 0; k < J; ++k) {
    classes[k].validate();
    const double m = static_cast<double>(classes[k].alphabet_size) + (inflate_null ? 1.0 : 0.0);
    rate_nats_[k] = rho.value * s.counts[k] * std::log(m);
  }
  for (std::size_t j = 0; j < J; ++j) {
    exponent_[j].resize(J - j);
    for (std::size_t k = j; k < J; ++k) {
      exponent_[j][k - j] = e0_dbc(spec, k, j, rho);
    }
  }
}

double DbcChiEvaluator::chi(std::size_t receiver, std::int64_t n) const {
  const std::size_t J = exponent_.size();
  if (receiver >= J) throw std::invalid_argument("DbcChiEvaluator::chi: bad receiver");
  double total = 0.0;
  for (std::size_t k = receiver; k < J; ++k) {
    total += std::exp(rate_nats_[k] -
                      static_cast<double>(n) * exponent_[receiver][k - receiver]);
  }
  return total;
}

std::int64_t DbcChiEvaluator::bracket_lower(std::size_t receiver, double p_e) const {
  const std::size_t J = exponent_.size();
  std::int64_t best = 1;
  for (std::size_t k = receiver; k < J; ++k) {
    best = std::max(best, ceil_multiple_count(-std::log(p_e) + rate_nats_[k],
                                              exponent_[receiver][k - receiver]));
  }
  return best;
}

std::int64_t DbcChiEvaluator::bracket_upper(std::size_t receiver, double p_e) const {
  const std::size_t J = exponent_.size();
  const double shrunk = p_e / static_cast<double>(J - receiver);
  std::int64_t best = 1;
  for (std::size_t k = receiver; k < J; ++k) {
    best = std::max(best, ceil_multiple_count(-std::log(shrunk) + rate_nats_[k],
                                              exponent_[receiver][k - receiver]));
  }
  return best;
}

void DbcChiEvaluator::require_feasible(std::size_t receiver) const {
  const std::size_t J = exponent_.size();
  for (std::size_t k = receiver; k < J; ++k) {
    if (!(exponent_[receiver][k - receiver] > 0.0)) {
      throw InfeasibleExponent(
          "successive decoding bound cannot reach the target: source " + std::to_string(k) +
              " at receiver " + std::to_string(receiver) + " has non-positive exponent",
          (1u << k) | (1u << receiver));
    }
  }
}

double chi_dbc(const DegradedBroadcastSpec& spec, const std::vector<MessageClass>& classes,
               const Schedule& s, RhoParam rho, std::size_t receiver, std::int64_t n) {
  return DbcChiEvaluator(spec, classes, s, rho).chi(receiver, n);
}

DbcCodewordLengths min_codeword_length_dbc(const DegradedBroadcastSpec& spec,
                                           const std::vector<MessageClass>& classes,
                                           const Schedule& s, RhoParam rho, bool inflate_null) {
  DbcChiEvaluator eval(spec, classes, s, rho, inflate_null);
  const std::size_t J = spec.num_receivers();
  DbcCodewordLengths out;
  out.per_receiver.assign(J, 0);
  out.detail.resize(J);
  if (s.total() == 0) throw std::invalid_argument("min_codeword_length_dbc: empty schedule");
  for (std::size_t j = 0; j < J; ++j) {
    if (s.counts[j] == 0) continue;  // receiver j decodes nothing this schedule
    const double p_e = classes[j].target_error;
    eval.require_feasible(j);
    out.detail[j] = search_min_length([&](std::int64_t n) { return eval.chi(j, n); },
                                      eval.bracket_lower(j, p_e),
                                      eval.bracket_upper(j, p_e), p_e);
    out.per_receiver[j] = out.detail[j].n;
    out.overall = std::max(out.overall, out.detail[j].n);
  }
  return out;
}

}  // namespace schedcomm
