#include "schedcomm/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

namespace schedcomm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

constexpr std::uint64_t kArrivalTag = 0x61727276ULL;
constexpr std::uint64_t kPolicyTag = 0x706f6c63ULL;
constexpr std::uint64_t kSplitTag = 0x73706c74ULL;

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t tag) {
  const std::uint64_t mixed = splitmix64(splitmix64(splitmix64(seed) ^ replication) ^ tag);
  return std::mt19937_64(mixed);
}

int sample_batch(BatchKind kind, double rate, std::mt19937_64& rng, std::int64_t slot) {
  switch (kind) {
    case BatchKind::Bernoulli: {
      if (rate > 1.0) throw std::invalid_argument("Bernoulli rate above 1");
      return uniform01(rng) < rate ? 1 : 0;
    }
    case BatchKind::DeterministicCycle: {
      const auto lo = static_cast<std::int64_t>(std::floor(rate * static_cast<double>(slot)));
      const auto hi =
          static_cast<std::int64_t>(std::floor(rate * static_cast<double>(slot + 1)));
      return static_cast<int>(hi - lo);
    }
    case BatchKind::Poisson: {
      // inversion by sequential search; desk-scale rates keep this short
      const double u = uniform01(rng);
      double p = std::exp(-rate);
      double cum = p;
      int k = 0;
      while (u > cum && k < kMaxBatch) {
        ++k;
        p *= rate / k;
        cum += p;
        if (p <= 0.0) break;
      }
      return k;
    }
  }
  return 0;
}

std::vector<std::vector<double>> default_split(const std::vector<WeightedSchedule>& support,
                                               const std::vector<std::int64_t>& codeword_length,
                                               std::size_t num_classes) {
  std::vector<std::vector<double>> split(num_classes,
                                         std::vector<double>(support.size(), 0.0));
  for (std::size_t j = 0; j < num_classes; ++j) {
    double denom = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i].s.counts[j] > 0) {
        denom += support[i].w * support[i].s.counts[j] /
                 static_cast<double>(codeword_length[i]);
      }
    }
    if (denom <= 0.0) continue;  // class j never scheduled; split stays zero
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i].s.counts[j] > 0) {
        split[j][i] = support[i].w * support[i].s.counts[j] /
                      static_cast<double>(codeword_length[i]) / denom;
      }
    }
  }
  return split;
}

void SimConfig::validate() const {
  if (num_classes == 0) throw std::invalid_argument("SimConfig: no classes");
  if (K < 1) throw std::invalid_argument("SimConfig: K < 1");
  if (horizon < 10 * static_cast<std::int64_t>(K)) {
    throw std::invalid_argument("SimConfig: horizon below 10*K");
  }
  if (arrivals.rates.size() != num_classes) {
    throw std::invalid_argument("SimConfig: arrival rates size");
  }
  for (double r : arrivals.rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("SimConfig: bad rate");
  }
  policy.validate(num_classes, K);
  if (mode == Mode::Independent) {
    if (policy.kind == PolicyKind::SubclassStateIndependent) {
      throw std::invalid_argument("SimConfig: subclass policy needs joint or dbc mode");
    }
    if (service_req.size() != num_classes) {
      throw std::invalid_argument("SimConfig: service requirements size");
    }
    if (quanta.schedules.empty()) throw std::invalid_argument("SimConfig: missing quanta");
    // Every schedule the policy can implement must carry usable quanta.
    for (std::size_t i = 0; i < quanta.schedules.size(); ++i) {
      const Schedule& s = quanta.schedules[i];
      bool reachable = policy.kind == PolicyKind::NonIdling;
      for (const auto& ws : policy.p) {
        if (ws.w > 0.0 && s.dominated_by(ws.s)) reachable = true;
      }
      if (!reachable) continue;
      for (std::size_t j = 0; j < num_classes; ++j) {
        if (s.counts[j] > 0 && std::isnan(quanta.phi[i][j])) {
          throw std::invalid_argument(
              "SimConfig: policy can reach a schedule with undefined quanta "
              "(discrete law with repeated class counts)");
        }
      }
    }
  } else {
    if (policy.kind != PolicyKind::SubclassStateIndependent) {
      throw std::invalid_argument("SimConfig: joint/dbc mode needs a subclass policy");
    }
    if (codeword_length.size() != policy.p.size()) {
      throw std::invalid_argument("SimConfig: codeword lengths misaligned with policy");
    }
    for (std::size_t i = 0; i < policy.p.size(); ++i) {
      if (!policy.p[i].s.is_empty() && codeword_length[i] < 1) {
        throw std::invalid_argument("SimConfig: codeword length < 1");
      }
    }
    if (arrivals.split.size() != num_classes) {
      throw std::invalid_argument("SimConfig: arrival split size");
    }
    for (std::size_t j = 0; j < num_classes; ++j) {
      if (arrivals.split[j].size() != policy.p.size()) {
        throw std::invalid_argument("SimConfig: arrival split row size");
      }
      double mass = 0.0;
      for (std::size_t i = 0; i < policy.p.size(); ++i) {
        const double v = arrivals.split[j][i];
        if (!(v >= 0.0)) throw std::invalid_argument("SimConfig: negative split");
        if (v > 0.0 && policy.p[i].s.counts[j] == 0) {
          throw std::invalid_argument("SimConfig: split mass on a subclass with s_j = 0");
        }
        mass += v;
      }
      if (arrivals.rates[j] > 0.0 && std::fabs(mass - 1.0) > 1e-9) {
        throw std::invalid_argument("SimConfig: split row must sum to 1");
      }
    }
  }
}

double SimConfig::mean_arriving_work() const {
  double total = 0.0;
  if (mode == Mode::Independent) {
    for (std::size_t j = 0; j < num_classes; ++j) {
      total += arrivals.rates[j] * service_req[j];
    }
  } else {
    for (std::size_t j = 0; j < num_classes; ++j) {
      double mean_len = 0.0;
      for (std::size_t i = 0; i < policy.p.size(); ++i) {
        mean_len += arrivals.split[j][i] * static_cast<double>(codeword_length[i]);
      }
      total += arrivals.rates[j] * mean_len;
    }
  }
  return total;
}

StabilityVerdict classify_series(const std::vector<double>& work_series,
                                 const std::vector<std::int64_t>& n_series,
                                 std::int64_t empty_visits_second_half,
                                 double mean_arriving_work) {
  StabilityVerdict v;
  const std::size_t len = work_series.size();
  const std::size_t half = len / 2;
  const std::size_t tail = len - half;

  // mean queue with batch-means CI over the second half
  if (tail > 0) {
    double mean = 0.0;
    for (std::size_t t = half; t < len; ++t) mean += static_cast<double>(n_series[t]);
    mean /= static_cast<double>(tail);
    v.mean_queue = mean;
    constexpr std::size_t kBatches = 16;
    if (tail >= kBatches * 4) {
      const std::size_t bs = tail / kBatches;
      double bsum = 0.0, bsq = 0.0;
      for (std::size_t b = 0; b < kBatches; ++b) {
        double m = 0.0;
        for (std::size_t t = half + b * bs; t < half + (b + 1) * bs; ++t) {
          m += static_cast<double>(n_series[t]);
        }
        m /= static_cast<double>(bs);
        bsum += m;
        bsq += m * m;
      }
      const double bmean = bsum / kBatches;
      const double bvar = std::max(0.0, bsq / kBatches - bmean * bmean) *
                          (double(kBatches) / (kBatches - 1));
      v.mean_queue_ci = 1.96 * std::sqrt(bvar / kBatches);
    }
  }

  bool all_zero = true;
  for (double w : work_series) {
    if (w != 0.0) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) {
    v.label = StabilityVerdict::Label::Stable;
    return v;
  }
  if (tail < 10000) {
    v.label = StabilityVerdict::Label::Inconclusive;
    return v;
  }

  // least-squares slope of residual work over the second half
  const double n = static_cast<double>(tail);
  double st = 0.0, sw = 0.0, stt = 0.0, stw = 0.0;
  for (std::size_t t = half; t < len; ++t) {
    const double x = static_cast<double>(t - half);
    st += x;
    sw += work_series[t];
    stt += x * x;
    stw += x * work_series[t];
  }
  const double denom = n * stt - st * st;
  v.slope = denom > 0.0 ? (n * stw - st * sw) / denom : 0.0;

  const double eps = 0.01 * mean_arriving_work;
  const double empty_rate = static_cast<double>(empty_visits_second_half) / n;
  if (v.slope > eps && empty_visits_second_half == 0) {
    v.label = StabilityVerdict::Label::Unstable;
  } else if (std::fabs(v.slope) < eps && empty_rate >= 2e-5) {
    v.label = StabilityVerdict::Label::Stable;
  } else {
    v.label = StabilityVerdict::Label::Inconclusive;
  }
  return v;
}

const char* to_string(StabilityVerdict::Label label) {
  switch (label) {
    case StabilityVerdict::Label::Stable:
      return "stable";
    case StabilityVerdict::Label::Unstable:
      return "unstable";
    case StabilityVerdict::Label::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::vector<ClassSojournStats> sojourn_stats(const SimReport& report) {
  std::vector<ClassSojournStats> out(report.sojourns.size());
  for (std::size_t j = 0; j < report.sojourns.size(); ++j) {
    const auto& xs = report.sojourns[j];
    ClassSojournStats& st = out[j];
    st.count = xs.size();
    st.flagged = xs.size() < 100;
    if (xs.empty()) continue;
    double sum = 0.0;
    for (auto v : xs) sum += static_cast<double>(v);
    st.mean = sum / static_cast<double>(xs.size());
    std::vector<std::int64_t> sorted(xs);
    std::sort(sorted.begin(), sorted.end());
    st.p50 = static_cast<double>(sorted[(sorted.size() - 1) / 2]);
    st.p95 = static_cast<double>(sorted[(sorted.size() - 1) * 95 / 100]);
    constexpr std::size_t kBatches = 16;
    if (xs.size() >= kBatches * 4) {
      const std::size_t bs = xs.size() / kBatches;
      double bsum = 0.0, bsq = 0.0;
      for (std::size_t b = 0; b < kBatches; ++b) {
        double m = 0.0;
        for (std::size_t t = b * bs; t < (b + 1) * bs; ++t) {
          m += static_cast<double>(xs[t]);
        }
        m /= static_cast<double>(bs);
        bsum += m;
        bsq += m * m;
      }
      const double bmean = bsum / kBatches;
      const double bvar = std::max(0.0, bsq / kBatches - bmean * bmean) *
                          (double(kBatches) / (kBatches - 1));
      st.ci_halfwidth = 1.96 * std::sqrt(bvar / kBatches);
    }
  }
  return out;
}

namespace {

struct RealMessage {
  double residual;
  std::int64_t arrival;
};

struct UnitMessage {
  std::int64_t residual;
  std::int64_t arrival;
};

SimReport init_report(const SimConfig& cfg, std::size_t rep) {
  SimReport r;
  r.seed = cfg.seed;
  r.replication = rep;
  r.horizon = cfg.horizon;
  r.n_series.reserve(cfg.horizon);
  r.work_series.reserve(cfg.horizon);
  r.sojourns.resize(cfg.num_classes);
  r.mean_arriving_work = cfg.mean_arriving_work();
  return r;
}

void finish_report(SimReport& r) {
  const std::size_t half = r.n_series.size() / 2;
  for (std::size_t t = 0; t < r.n_series.size(); ++t) {
    if (r.n_series[t] == 0) {
      ++r.empty_visits;
      if (t >= half) ++r.empty_visits_second_half;
    }
  }
  r.verdict =
      classify_series(r.work_series, r.n_series, r.empty_visits_second_half,
                      r.mean_arriving_work);
}

SimReport run_independent(const SimConfig& cfg, std::size_t rep) {
  SimReport report = init_report(cfg, rep);
  auto arrival_rng = make_stream(cfg.seed, rep, kArrivalTag);
  auto policy_rng = make_stream(cfg.seed, rep, kPolicyTag);

  const std::size_t J = cfg.num_classes;
  std::vector<std::deque<RealMessage>> queues(J);
  std::vector<int> occupancy(J, 0);
  std::int64_t n_total = 0;
  double work_total = 0.0;

  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    // schedule against the state read at the slot start
    const Schedule action = choose_schedule(cfg.policy, occupancy, cfg.K, policy_rng);
    const std::vector<double>& phi = cfg.quanta.row(action);
    double served_work = 0.0;
    double quantum_budget = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const int serve = std::min(action.counts[j], occupancy[j]);
      if (serve == 0) continue;
      const double q = phi[j];
      quantum_budget += serve * q;
      for (int k = 0; k < serve; ++k) {
        RealMessage& m = queues[j][static_cast<std::size_t>(k)];
        const double delta = std::min(m.residual, q);
        m.residual -= delta;
        served_work += delta;
        work_total -= delta;
      }
      while (!queues[j].empty() && queues[j].front().residual <= kResidualTol) {
        work_total -= queues[j].front().residual;
        report.sojourns[j].push_back(t - queues[j].front().arrival);
        queues[j].pop_front();
        --occupancy[j];
        --n_total;
      }
    }
    if (served_work > quantum_budget + 1e-9) report.work_audit_ok = false;
    // new arrivals enter after service
    for (std::size_t j = 0; j < J; ++j) {
      const int batch = sample_batch(cfg.arrivals.kind, cfg.arrivals.rates[j], arrival_rng, t);
      for (int b = 0; b < batch; ++b) {
        queues[j].push_back({cfg.service_req[j], t});
        work_total += cfg.service_req[j];
        ++occupancy[j];
        ++n_total;
      }
    }
    report.n_series.push_back(n_total);
    report.work_series.push_back(work_total);
  }
  finish_report(report);
  return report;
}

SimReport run_subclass(const SimConfig& cfg, std::size_t rep) {
  SimReport report = init_report(cfg, rep);
  auto arrival_rng = make_stream(cfg.seed, rep, kArrivalTag);
  auto policy_rng = make_stream(cfg.seed, rep, kPolicyTag);
  auto split_rng = make_stream(cfg.seed, rep, kSplitTag);

  const std::size_t J = cfg.num_classes;
  const std::size_t S = cfg.policy.p.size();
  std::vector<double> pw(S);
  for (std::size_t i = 0; i < S; ++i) pw[i] = cfg.policy.p[i].w;

  // queues[i][j]: subclass (j, s_i) FIFO
  std::vector<std::vector<std::deque<UnitMessage>>> queues(
      S, std::vector<std::deque<UnitMessage>>(J));
  std::int64_t n_total = 0;
  std::int64_t work_total = 0;
  report.subclass_arrivals.assign(J, std::vector<std::int64_t>(S, 0));

  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    const std::size_t pick = sample_index(pw, policy_rng);
    const Schedule& s = cfg.policy.p[pick].s;
    const std::int64_t N = cfg.codeword_length[pick];
    auto& slice = queues[pick];

    // The partially served cohort sits at the queue heads; fresh messages
    // behind it still carry the full length N.
    bool ongoing = false;
    for (std::size_t j = 0; j < J; ++j) {
      if (s.counts[j] > 0 && !slice[j].empty() && slice[j].front().residual < N) {
        ongoing = true;
        break;
      }
    }
    std::int64_t served = 0;
    for (std::size_t j = 0; j < J; ++j) {
      if (s.counts[j] == 0 || slice[j].empty()) continue;
      int serve = 0;
      if (ongoing) {
        // serve exactly the cohort members of this class
        std::int64_t cohort_residual = -1;
        for (std::size_t k = 0; k < slice[j].size() && k < static_cast<std::size_t>(s.counts[j]);
             ++k) {
          if (slice[j][k].residual < N) {
            if (cohort_residual < 0) cohort_residual = slice[j][k].residual;
            if (slice[j][k].residual != cohort_residual) report.cohort_audit_ok = false;
            serve = static_cast<int>(k) + 1;
          } else {
            break;
          }
        }
        // behind the cohort only fresh messages may sit
        if (serve < static_cast<int>(slice[j].size()) &&
            slice[j][static_cast<std::size_t>(serve)].residual < N) {
          report.cohort_audit_ok = false;
        }
      } else {
        serve = std::min<std::int64_t>(s.counts[j],
                                       static_cast<std::int64_t>(slice[j].size()));
      }
      for (int k = 0; k < serve; ++k) {
        slice[j][static_cast<std::size_t>(k)].residual -= 1;
        work_total -= 1;
        ++served;
      }
      while (!slice[j].empty() && slice[j].front().residual == 0) {
        report.sojourns[j].push_back(t - slice[j].front().arrival);
        slice[j].pop_front();
        --n_total;
      }
    }
    if (served > s.total()) report.work_audit_ok = false;

    for (std::size_t j = 0; j < J; ++j) {
      const int batch = sample_batch(cfg.arrivals.kind, cfg.arrivals.rates[j], arrival_rng, t);
      for (int b = 0; b < batch; ++b) {
        const std::size_t idx = sample_index(cfg.arrivals.split[j], split_rng);
        ++report.subclass_arrivals[j][idx];
        queues[idx][j].push_back({cfg.codeword_length[idx], t});
        work_total += cfg.codeword_length[idx];
        ++n_total;
      }
    }
    report.n_series.push_back(n_total);
    report.work_series.push_back(static_cast<double>(work_total));
  }
  finish_report(report);
  return report;
}

}  // namespace

SimReport run_replication(const SimConfig& config, std::size_t replication) {
  config.validate();
  if (config.mode == Mode::Independent) return run_independent(config, replication);
  return run_subclass(config, replication);
}

std::vector<SimReport> run(const SimConfig& config) {
  config.validate();
  const std::size_t R = config.replications;
  std::vector<SimReport> out(R);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t next = 0;
  while (next < R) {
    const std::size_t batch = std::min<std::size_t>(hw, R - next);
    std::vector<std::future<SimReport>> futs;
    futs.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      futs.push_back(std::async(std::launch::async, run_replication, std::cref(config),
                                next + i));
    }
    for (std::size_t i = 0; i < batch; ++i) out[next + i] = futs[i].get();
    next += batch;
  }
  return out;
}

}  // namespace schedcomm
