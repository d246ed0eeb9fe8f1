#include "schedcomm/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace schedcomm {

double LinearBound::evaluate(const std::vector<double>& ea) const {
  double v = 0.0;
  for (std::size_t j = 0; j < coeff.size(); ++j) v += coeff[j] * ea[j];
  return v;
}

double LinearBound::threshold_scale(const std::vector<double>& dir) const {
  const double d = evaluate(dir);
  return d > 0.0 ? rhs / d : std::numeric_limits<double>::infinity();
}

double NonIdlingBounds::inner_scale(const std::vector<double>& dir) const {
  return std::max(per_symbol.threshold_scale(dir), workload.threshold_scale(dir));
}

NonIdlingBounds nonidling_inner_bounds(const std::vector<double>& service_req,
                                       const QuantaTable& quanta, int K) {
  const std::size_t J = service_req.size();
  NonIdlingBounds out;
  out.phi_lo.assign(J, std::numeric_limits<double>::infinity());
  out.phi_hi.assign(J, 0.0);
  double min_full_quantum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < quanta.schedules.size(); ++i) {
    const Schedule& s = quanta.schedules[i];
    for (std::size_t j = 0; j < J; ++j) {
      if (s.counts[j] > 0) out.phi_hi[j] = std::max(out.phi_hi[j], quanta.phi[i][j]);
    }
    if (s.total() != K) continue;
    double total = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      total += s.counts[j] * quanta.phi[i][j];
      if (s.counts[j] > 0) out.phi_lo[j] = std::min(out.phi_lo[j], quanta.phi[i][j]);
    }
    min_full_quantum = std::min(min_full_quantum, total);
  }
  out.per_symbol.coeff.resize(J);
  out.workload.coeff.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    out.per_symbol.coeff[j] =
        static_cast<double>(ceil_multiple_count(service_req[j], out.phi_lo[j]));
    out.workload.coeff[j] = service_req[j] + out.phi_hi[j];
  }
  out.per_symbol.rhs = static_cast<double>(K);
  out.workload.rhs = min_full_quantum;
  return out;
}

LinearBound nonidling_transience_bound(const std::vector<double>& service_req,
                                       const QuantaTable& quanta, int K,
                                       std::uint32_t subset_mask) {
  const std::size_t J = service_req.size();
  if (subset_mask == 0 || subset_mask >= (1u << J)) {
    throw std::invalid_argument("nonidling_transience_bound: bad subset");
  }
  LinearBound out;
  out.coeff.assign(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    if (subset_mask & (1u << j)) out.coeff[j] = service_req[j];
  }
  double best = 0.0;
  for (std::size_t i = 0; i < quanta.schedules.size(); ++i) {
    const Schedule& s = quanta.schedules[i];
    if (s.total() != K) continue;
    double total = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      if (subset_mask & (1u << j)) total += s.counts[j] * quanta.phi[i][j];
    }
    best = std::max(best, total);
  }
  out.rhs = best;
  return out;
}

std::vector<double> state_independent_thresholds(const std::vector<double>& service_req,
                                                 const QuantaTable& quanta,
                                                 const PolicySpec& policy) {
  const std::size_t J = service_req.size();
  std::vector<double> phi_hi(J, 0.0);
  for (std::size_t i = 0; i < quanta.schedules.size(); ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      if (quanta.schedules[i].counts[j] > 0) {
        phi_hi[j] = std::max(phi_hi[j], quanta.phi[i][j]);
      }
    }
  }
  std::vector<double> out(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    double served = 0.0;
    for (const auto& ws : policy.p) {
      if (ws.s.counts[j] > 0) {
        served += ws.w * ws.s.counts[j] * quanta.phi_of(ws.s, j);
      }
    }
    out[j] = served / (service_req[j] + phi_hi[j]);
  }
  return out;
}

JointRegion joint_region(const std::vector<WeightedSchedule>& support,
                         const std::vector<std::int64_t>& codeword_length,
                         std::size_t num_classes) {
  if (support.size() != codeword_length.size()) {
    throw std::invalid_argument("joint_region: misaligned inputs");
  }
  JointRegion out;
  out.class_threshold.assign(num_classes, 0.0);
  out.generators.resize(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    out.generators[i].assign(num_classes, 0.0);
    for (std::size_t j = 0; j < num_classes; ++j) {
      if (support[i].s.counts[j] > 0) {
        const double r = support[i].s.counts[j] / static_cast<double>(codeword_length[i]);
        out.generators[i][j] = r;
        out.class_threshold[j] += support[i].w * r;
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> joint_rate_vectors(const std::vector<Schedule>& schedules,
                                                    const std::vector<std::int64_t>& lengths) {
  std::vector<std::vector<double>> out(schedules.size());
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    const std::size_t J = schedules[i].num_classes();
    out[i].assign(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      if (schedules[i].counts[j] > 0) {
        out[i][j] = schedules[i].counts[j] / static_cast<double>(lengths[i]);
      }
    }
  }
  return out;
}

namespace {

constexpr double kLpTol = 1e-10;

// Dense revised simplex for min c.x s.t. A x = b, x >= 0 with b >= 0.
// Columns beyond `blockable` may not enter the basis (artificials in phase 2).
struct Simplex {
  std::size_t m;                           // rows
  std::vector<std::vector<double>> cols;   // column-major A
  std::vector<double> cost;
  std::vector<double> b;
  std::vector<std::size_t> basis;          // size m
  std::vector<std::vector<double>> binv;   // m x m
  std::size_t enter_limit;

  std::vector<double> basic_values() const {
    std::vector<double> x(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < m; ++k) v += binv[i][k] * b[k];
      x[i] = v;
    }
    return x;
  }

  std::vector<double> duals() const {
    std::vector<double> y(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < m; ++i) y[k] += cost[basis[i]] * binv[i][k];
    }
    return y;
  }

  // Bland's rule keeps the walk finite under degeneracy.
  bool iterate() {
    const std::vector<double> y = duals();
    std::size_t enter = cols.size();
    for (std::size_t k = 0; k < enter_limit; ++k) {
      bool basic = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] == k) basic = true;
      }
      if (basic) continue;
      double red = cost[k];
      for (std::size_t i = 0; i < m; ++i) red -= y[i] * cols[k][i];
      if (red < -kLpTol) {
        enter = k;
        break;
      }
    }
    if (enter == cols.size()) return false;  // optimal

    std::vector<double> d(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) d[i] += binv[i][k] * cols[enter][k];
    }
    const std::vector<double> xb = basic_values();
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (d[i] > kLpTol) {
        const double t = xb[i] / d[i];
        if (t < theta - kLpTol ||
            (t < theta + kLpTol && (leave == m || basis[i] < basis[leave]))) {
          theta = t;
          leave = i;
        }
      }
    }
    if (leave == m) {
      throw std::runtime_error("membership program unbounded (degenerate inputs)");
    }
    // pivot: binv <- E binv
    const double piv = d[leave];
    for (std::size_t k = 0; k < m; ++k) binv[leave][k] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = d[i];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < m; ++k) binv[i][k] -= f * binv[leave][k];
    }
    basis[leave] = enter;
    return true;
  }

  void solve() {
    for (int it = 0; it < 20000; ++it) {
      if (!iterate()) return;
    }
    throw std::runtime_error("membership program did not converge");
  }

  double objective() const {
    const std::vector<double> xb = basic_values();
    double obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) obj += cost[basis[i]] * xb[i];
    return obj;
  }
};

}  // namespace

MembershipResult outer_membership(const std::vector<double>& ea,
                                  const std::vector<std::vector<double>>& generators) {
  const std::size_t m = ea.size();
  if (m == 0 || m > 31) throw std::invalid_argument("outer_membership: bad dimension");
  for (double v : ea) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("outer_membership: rates must be finite and >= 0");
    }
  }
  const std::size_t g = generators.size();
  Simplex sx;
  sx.m = m;
  sx.b = ea;
  // columns: g generator weights, m surpluses (-I), m artificials (+I)
  sx.cols.resize(g + 2 * m);
  sx.cost.assign(g + 2 * m, 0.0);
  for (std::size_t k = 0; k < g; ++k) {
    if (generators[k].size() != m) {
      throw std::invalid_argument("outer_membership: generator dimension");
    }
    sx.cols[k] = generators[k];
  }
  for (std::size_t i = 0; i < m; ++i) {
    sx.cols[g + i].assign(m, 0.0);
    sx.cols[g + i][i] = -1.0;
    sx.cols[g + m + i].assign(m, 0.0);
    sx.cols[g + m + i][i] = 1.0;
  }
  sx.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) sx.basis[i] = g + m + i;
  sx.binv.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) sx.binv[i][i] = 1.0;

  // phase 1: drive the artificials to zero
  for (std::size_t i = 0; i < m; ++i) sx.cost[g + m + i] = 1.0;
  sx.enter_limit = g + 2 * m;
  sx.solve();
  MembershipResult res;
  if (sx.objective() > 1e-9) {
    // not coverable at any mass; the phase-1 prices separate
    res.inside = false;
    res.mass = std::numeric_limits<double>::infinity();
    res.certificate = sx.duals();
    return res;
  }
  // phase 2: minimize total generator weight, artificials may not re-enter
  for (std::size_t k = 0; k < g + 2 * m; ++k) sx.cost[k] = k < g ? 1.0 : 0.0;
  sx.enter_limit = g + m;
  sx.solve();
  res.mass = sx.objective();
  const std::vector<double> xb = sx.basic_values();
  res.weights.assign(g, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (sx.basis[i] < g) res.weights[sx.basis[i]] = std::max(0.0, xb[i]);
  }
  if (res.mass <= 1.0 + 1e-9) {
    res.inside = true;
  } else {
    res.inside = false;
    res.certificate = sx.duals();
    res.weights.clear();
  }
  return res;
}

SynthesizedPolicy synthesize_policy(const std::vector<double>& ea,
                                    const std::vector<std::vector<double>>& generators) {
  MembershipResult mem = outer_membership(ea, generators);
  if (!mem.inside || mem.mass >= 1.0 - 1e-9) {
    throw BoundaryRefusal("target rates are not strictly inside the achievable region");
  }
  const std::size_t g = generators.size();
  // Idle mass is folded back into the schedules that already carry covering
  // weight; schedules the covering never touches stay unused, so no subclass
  // is created only to dilute the served ones.
  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < g; ++k) {
    if (mem.weights[k] > 1e-12) support.push_back(k);
  }
  if (support.empty()) {
    // zero target: park the mass on any schedule that serves something
    for (std::size_t k = 0; k < g; ++k) {
      for (double v : generators[k]) {
        if (v > 0.0) {
          support.push_back(k);
          break;
        }
      }
      if (!support.empty()) break;
    }
  }
  if (support.empty()) throw BoundaryRefusal("no usable generators");
  const double idle = 1.0 - mem.mass;
  std::vector<double> bonus_weight(g, 0.0);
  double bonus_total = 0.0;
  for (const std::size_t k : support) {
    bonus_weight[k] = mem.weights[k] + 1.0 / static_cast<double>(support.size());
    bonus_total += bonus_weight[k];
  }
  SynthesizedPolicy out;
  out.weights.assign(g, 0.0);
  for (std::size_t k = 0; k < g; ++k) {
    out.weights[k] = mem.weights[k] + idle * bonus_weight[k] / bonus_total;
  }
  const std::size_t J = ea.size();
  out.class_threshold.assign(J, 0.0);
  for (std::size_t k = 0; k < g; ++k) {
    for (std::size_t j = 0; j < J; ++j) {
      out.class_threshold[j] += out.weights[k] * generators[k][j];
    }
  }
  out.slack = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    if (ea[j] > 0.0) {
      out.slack = std::min(out.slack, (out.class_threshold[j] - ea[j]) / out.class_threshold[j]);
    }
  }
  if (!(out.slack > 0.0)) {
    throw BoundaryRefusal("synthesized policy has no slack; point too close to the boundary");
  }
  return out;
}

std::vector<double> interference_limited_caps(const GaussianMacSpec& spec, const Schedule& s) {
  const std::size_t J = spec.num_classes();
  if (s.num_classes() != J) {
    throw std::invalid_argument("interference_limited_caps: dimension mismatch");
  }
  double load = 0.0;
  for (std::size_t k = 0; k < J; ++k) load += s.counts[k] * spec.snr[k];
  std::vector<double> out(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    if (s.counts[j] > 0) {
      out[j] = s.counts[j] * std::log1p(spec.snr[j] / (load - spec.snr[j] + 1.0));
    }
  }
  return out;
}

double single_user_capacity_limit(double snr, int K) {
  return K * std::log1p(snr / ((K - 1) * snr + 1.0));
}

double saturation_constant(double rho) { return rho / (1.0 + rho); }

std::vector<double> nat_rates(const std::vector<MessageClass>& classes,
                              const std::vector<double>& ea) {
  if (classes.size() != ea.size()) throw std::invalid_argument("nat_rates: dimension mismatch");
  std::vector<double> out(ea.size());
  for (std::size_t j = 0; j < ea.size(); ++j) out[j] = classes[j].log_alphabet() * ea[j];
  return out;
}

AsymptoticCaps asymptotic_caps(const GaussianMacSpec& spec, const Schedule& s, int K,
                               double rho) {
  AsymptoticCaps out;
  out.interference_limited = interference_limited_caps(spec, s);
  out.single_user_limit = single_user_capacity_limit(spec.snr.front(), K);
  out.saturation = saturation_constant(rho);
  out.spectral_limit = 1.0;
  return out;
}

bool inside_pentagon(const std::vector<RateConstraint>& constraints,
                     const std::vector<double>& rates) {
  for (double r : rates) {
    if (!(r >= 0.0)) return false;
  }
  for (const auto& c : constraints) {
    double sum = 0.0;
    for (std::size_t j = 0; j < rates.size(); ++j) {
      if (c.subset & (1u << j)) sum += rates[j];
    }
    if (!(sum < c.bound)) return false;
  }
  return true;
}

bool inside_component_bounds(const std::vector<double>& bounds,
                             const std::vector<double>& rates) {
  for (std::size_t j = 0; j < rates.size(); ++j) {
    if (!(rates[j] >= 0.0) || !(rates[j] < bounds[j])) return false;
  }
  return true;
}

ScheduleForRate schedule_for_target_rate(const DiscreteMac& ch, const InputDistribution& q,
                                         const std::vector<double>& target, double eps,
                                         const std::vector<MessageClass>& classes,
                                         RhoParam rho, double p_e, double scale_nats) {
  const std::size_t J = ch.num_sources();
  if (target.size() != J || classes.size() != J) {
    throw std::invalid_argument("schedule_for_target_rate: dimension mismatch");
  }
  ScheduleForRate out;
  out.s.counts.assign(J, 0);
  for (std::size_t j = 0; j < J; ++j) {
    const double want = scale_nats * (target[j] + eps) / classes[j].log_alphabet();
    out.s.counts[j] = std::max(1, static_cast<int>(std::ceil(want - 1e-12)));
  }
  const CodewordLengthResult res =
      min_codeword_length_mac(ch, q, classes, out.s, rho, p_e);
  out.codeword_length = res.n;
  out.achieved.assign(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    out.achieved[j] = out.s.counts[j] * classes[j].log_alphabet() / static_cast<double>(res.n);
  }
  return out;
}

double single_class_nat_threshold(double log_alphabet, double service_req, double phi_lo,
                                  int K) {
  return log_alphabet * static_cast<double>(K) /
         static_cast<double>(ceil_multiple_count(service_req, phi_lo));
}

double spectral_nat_threshold(double snr, int K, double rho, double log_alphabet) {
  const GaussianMacSpec spec({snr});
  Schedule full(std::vector<int>{K});
  const double phi = e0_gaussian_quantum(spec, full, 0, RhoParam(rho));
  // in the large-alphabet regime the target-error term of the service
  // requirement vanishes relative to rho ln M
  return single_class_nat_threshold(log_alphabet, rho * log_alphabet, phi, K);
}

}  // namespace schedcomm
