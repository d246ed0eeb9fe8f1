#include "schedcomm/exponents.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace schedcomm {

RhoParam::RhoParam(double rho) : value(rho) {
  if (!(rho > 0.0) || rho > 1.0) {
    throw std::invalid_argument("RhoParam: rho must lie in (0, 1]");
  }
}

namespace {

double check_dist_sum(const std::vector<double>& q, const char* what) {
  double sum = 0.0;
  for (double v : q) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kProbTol) {
    throw std::invalid_argument(std::string(what) + ": distribution not normalized");
  }
  return sum;
}

// -ln sum_y [sum_x q(x) p(y|x)^{1/(1+rho)}]^{1+rho} for a row-major p.
double e0_kernel(const double* p, std::size_t nx, std::size_t ny,
                 const std::vector<double>& q, double rho) {
  const double inv = 1.0 / (1.0 + rho);
  double g = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double a = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      const double pv = p[x * ny + y];
      if (pv > 0.0 && q[x] > 0.0) a += q[x] * std::pow(pv, inv);
    }
    if (a > 0.0) g += std::exp((1.0 + rho) * std::log(a));
  }
  return -std::log(g);
}

}  // namespace

double e0_single(const DiscreteChannel& ch, const std::vector<double>& q, RhoParam rho) {
  if (q.size() != ch.num_inputs) throw std::invalid_argument("e0_single: dimension mismatch");
  check_dist_sum(q, "e0_single");
  return e0_kernel(ch.p.data(), ch.num_inputs, ch.num_outputs, q, rho.value);
}

DiscreteChannel effective_mac_channel(const DiscreteMac& ch, const InputDistribution& q,
                                      const Schedule& s, std::size_t j) {
  const std::size_t J = ch.num_sources();
  if (s.num_classes() != J || q.num_sources() != J || j >= J) {
    throw std::invalid_argument("effective_mac_channel: dimension mismatch");
  }
  if (s.counts[j] <= 0) {
    throw std::invalid_argument("effective_mac_channel: class not scheduled (s_j = 0)");
  }
  for (std::size_t l = 0; l < J; ++l) {
    if (s.counts[l] > 1) {
      throw std::invalid_argument(
          "effective_mac_channel: the one-letter-per-source law defines counts 0 or 1 only");
    }
  }
  const std::size_t nx = ch.input_sizes[j];
  const std::size_t ny = ch.num_outputs;
  std::vector<double> eff(nx * ny, 0.0);
  const std::size_t joint = ch.num_joint_inputs();
  std::vector<std::size_t> x(J);
  for (std::size_t m = 0; m < joint; ++m) {
    ch.decode_joint(m, x);
    // weight of the interfering letters: scheduled classes other than j draw
    // from Q; unscheduled sources are pinned to letter 0 (they do not affect
    // a law that ignores them, and fixtures with idle sources must be built
    // so that the law is constant in those coordinates).
    double w = 1.0;
    bool skip = false;
    for (std::size_t l = 0; l < J; ++l) {
      if (l == j) continue;
      if (s.counts[l] > 0) {
        w *= q.q[l][x[l]];
      } else if (x[l] != 0) {
        skip = true;
      }
    }
    if (skip || w == 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      eff[x[j] * ny + y] += w * ch.at(m, y);
    }
  }
  return DiscreteChannel(nx, ny, std::move(eff));
}

double e0_independent(const DiscreteMac& ch, const InputDistribution& q, const Schedule& s,
                      std::size_t j, RhoParam rho) {
  const DiscreteChannel eff = effective_mac_channel(ch, q, s, j);
  return e0_single(eff, q.q[j], rho);
}

double e0_gaussian_quantum(const GaussianMacSpec& spec, const Schedule& s, std::size_t j,
                           RhoParam rho) {
  const std::size_t J = spec.num_classes();
  if (s.num_classes() != J || j >= J) {
    throw std::invalid_argument("e0_gaussian_quantum: dimension mismatch");
  }
  if (s.counts[j] <= 0) {
    throw std::invalid_argument("e0_gaussian_quantum: class not scheduled (s_j = 0)");
  }
  double load = 0.0;
  for (std::size_t k = 0; k < J; ++k) load += s.counts[k] * spec.snr[k];
  const double denom = (1.0 + rho.value) * (load - spec.snr[j] + 1.0);
  return rho.value * std::log1p(spec.snr[j] / denom);
}

double e0_mac_subset(const DiscreteMac& ch, const InputDistribution& q, std::uint32_t subset,
                     RhoParam rho) {
  const std::size_t J = ch.num_sources();
  if (subset == 0 || subset >= (std::uint32_t{1} << J)) {
    throw std::invalid_argument("e0_mac_subset: subset must be a non-empty subset");
  }
  if (q.num_sources() != J) throw std::invalid_argument("e0_mac_subset: dimension mismatch");
  const double inv = 1.0 / (1.0 + rho.value);
  const std::size_t ny = ch.num_outputs;

  std::vector<std::size_t> in_set, out_set;
  for (std::size_t j = 0; j < J; ++j) {
    if (subset & (1u << j)) {
      in_set.push_back(j);
    } else {
      out_set.push_back(j);
    }
  }
  std::size_t n_in = 1, n_out = 1;
  for (std::size_t j : in_set) n_in *= ch.input_sizes[j];
  for (std::size_t j : out_set) n_out *= ch.input_sizes[j];

  std::vector<std::size_t> x(J, 0);
  double g = 0.0;
  for (std::size_t mc = 0; mc < n_out; ++mc) {
    // complement letters and their product weight
    std::size_t rem = mc;
    double qc = 1.0;
    for (std::size_t t = out_set.size(); t-- > 0;) {
      const std::size_t j = out_set[t];
      x[j] = rem % ch.input_sizes[j];
      rem /= ch.input_sizes[j];
      qc *= q.q[j][x[j]];
    }
    if (qc == 0.0) continue;
    double inner_total = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      double a = 0.0;
      std::size_t rs = 0;
      // iterate subset letters
      for (std::size_t ms = 0; ms < n_in; ++ms) {
        rs = ms;
        double qs = 1.0;
        for (std::size_t t = in_set.size(); t-- > 0;) {
          const std::size_t j = in_set[t];
          x[j] = rs % ch.input_sizes[j];
          rs /= ch.input_sizes[j];
          qs *= q.q[j][x[j]];
        }
        if (qs == 0.0) continue;
        const double pv = ch.at(ch.joint_index(x), y);
        if (pv > 0.0) a += qs * std::pow(pv, inv);
      }
      if (a > 0.0) inner_total += std::exp((1.0 + rho.value) * std::log(a));
    }
    g += qc * inner_total;
  }
  return -std::log(g);
}

double e0_dbc(const DegradedBroadcastSpec& spec, std::size_t k, std::size_t j, RhoParam rho) {
  const std::size_t J = spec.num_receivers();
  if (k >= J || j > k) throw std::invalid_argument("e0_dbc: need j <= k < J");
  const DiscreteChannel eff = dbc_effective_channel(spec, k, j);
  if (k + 1 == J) {
    return e0_single(eff, spec.top_marginal, rho);
  }
  // Average the per-conditioning-letter Gallager sum over Q(x_{k+1}).
  const DiscreteChannel& Q = spec.ladder[k];  // X_{k+1} -> X_k
  const std::vector<double> upper = spec.input_marginal(k + 1);
  const double inv = 1.0 / (1.0 + rho.value);
  double g = 0.0;
  for (std::size_t xu = 0; xu < Q.num_inputs; ++xu) {
    if (upper[xu] == 0.0) continue;
    double inner_total = 0.0;
    for (std::size_t y = 0; y < eff.num_outputs; ++y) {
      double a = 0.0;
      for (std::size_t xk = 0; xk < eff.num_inputs; ++xk) {
        const double pv = eff.at(xk, y);
        const double qv = Q.at(xu, xk);
        if (pv > 0.0 && qv > 0.0) a += qv * std::pow(pv, inv);
      }
      if (a > 0.0) inner_total += std::exp((1.0 + rho.value) * std::log(a));
    }
    g += upper[xu] * inner_total;
  }
  return -std::log(g);
}

RhoLimitResult e0_over_rho_limit(const std::function<double(double)>& e0_of_rho) {
  constexpr int kLevels = 6;
  double f[kLevels];
  for (int i = 0; i < kLevels; ++i) {
    const double rho = std::pow(10.0, -1.0 - i);
    const double e0 = e0_of_rho(rho);
    if (!std::isfinite(e0)) throw std::runtime_error("e0_over_rho_limit: non-finite value");
    f[i] = e0 / rho;
  }
  // One Richardson stage removes the O(rho) term, a second the O(rho^2) term.
  double l1[kLevels - 1];
  for (int i = 0; i + 1 < kLevels; ++i) l1[i] = (10.0 * f[i + 1] - f[i]) / 9.0;
  double l2[kLevels - 2];
  for (int i = 0; i + 2 < kLevels; ++i) l2[i] = (100.0 * l1[i + 1] - l1[i]) / 99.0;

  RhoLimitResult out;
  out.value = l2[kLevels - 3];
  out.error_estimate = std::fabs(l2[kLevels - 3] - l2[kLevels - 4]) +
                       std::fabs(l2[kLevels - 3] - l1[kLevels - 2]);
  const double scale = std::max(1.0, std::fabs(out.value));
  if (!std::isfinite(out.value) || out.error_estimate > 1e-3 * scale) {
    throw std::runtime_error("e0_over_rho_limit: extrapolation did not converge");
  }
  return out;
}

double QuantaTable::phi_of(const Schedule& s, std::size_t j) const {
  return phi[index_of(s)][j];
}

std::size_t QuantaTable::index_of(const Schedule& s) const {
  std::uint64_t key = 0;
  for (int c : s.counts) key = key * static_cast<std::uint64_t>(K + 1) + c;
  auto it = index_.find(key);
  if (it == index_.end()) throw std::invalid_argument("QuantaTable: unknown schedule");
  return it->second;
}

const std::vector<double>& QuantaTable::row(const Schedule& s) const {
  return phi[index_of(s)];
}

double QuantaTable::total_quantum(std::size_t idx) const {
  double t = 0.0;
  for (std::size_t j = 0; j < phi[idx].size(); ++j) {
    t += schedules[idx].counts[j] * phi[idx][j];
  }
  return t;
}

void QuantaTable::build_index() {
  index_.clear();
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    std::uint64_t key = 0;
    for (int c : schedules[i].counts) key = key * static_cast<std::uint64_t>(K + 1) + c;
    index_.emplace(key, i);
  }
}

QuantaTable QuantaTable::gaussian(const GaussianMacSpec& spec, int K, RhoParam rho) {
  QuantaTable t;
  t.K = K;
  t.schedules = enumerate_schedules(spec.num_classes(), K);
  t.phi.resize(t.schedules.size());
  for (std::size_t i = 0; i < t.schedules.size(); ++i) {
    const Schedule& s = t.schedules[i];
    t.phi[i].assign(spec.num_classes(), 0.0);
    for (std::size_t j = 0; j < spec.num_classes(); ++j) {
      if (s.counts[j] > 0) t.phi[i][j] = e0_gaussian_quantum(spec, s, j, rho);
    }
  }
  t.build_index();
  return t;
}

QuantaTable QuantaTable::discrete(const DiscreteMac& ch, const InputDistribution& q, int K,
                                  RhoParam rho) {
  QuantaTable t;
  t.K = K;
  t.schedules = enumerate_schedules(ch.num_sources(), K);
  t.phi.resize(t.schedules.size());
  for (std::size_t i = 0; i < t.schedules.size(); ++i) {
    const Schedule& s = t.schedules[i];
    t.phi[i].assign(ch.num_sources(), 0.0);
    bool representable = true;
    for (int c : s.counts) {
      if (c > 1) representable = false;
    }
    for (std::size_t j = 0; j < ch.num_sources(); ++j) {
      if (s.counts[j] == 0) continue;
      t.phi[i][j] = representable ? e0_independent(ch, q, s, j, rho)
                                  : std::numeric_limits<double>::quiet_NaN();
    }
  }
  t.build_index();
  return t;
}

}  // namespace schedcomm
