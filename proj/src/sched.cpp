#include "schedcomm/sched.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace schedcomm {

int Schedule::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

bool Schedule::dominated_by(const Schedule& s) const {
  if (counts.size() != s.counts.size()) return false;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] > s.counts[j]) return false;
  }
  return true;
}

std::vector<Schedule> enumerate_schedules(std::size_t J, int K) {
  if (J == 0 || K < 1) throw std::invalid_argument("enumerate_schedules: need J >= 1, K >= 1");
  std::vector<Schedule> out;
  std::vector<int> cur(J, 0);
  // lexicographic counting with per-position budget
  while (true) {
    out.emplace_back(std::vector<int>(cur));
    // increment from the last coordinate
    std::size_t pos = J;
    while (pos > 0) {
      --pos;
      ++cur[pos];
      for (std::size_t t = pos + 1; t < J; ++t) cur[t] = 0;
      int total = std::accumulate(cur.begin(), cur.end(), 0);
      if (total <= K) break;
      cur[pos] = 0;
      if (pos == 0) return out;
    }
    if (pos == 0 && std::accumulate(cur.begin(), cur.end(), 0) == 0) return out;
  }
}

std::vector<std::size_t> full_schedule_indices(const std::vector<Schedule>& schedules, int K) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    if (schedules[i].total() == K) out.push_back(i);
  }
  return out;
}

Schedule maximal_subschedule(const Schedule& s, const std::vector<int>& occupancy) {
  if (s.counts.size() != occupancy.size()) {
    throw std::invalid_argument("maximal_subschedule: dimension mismatch");
  }
  Schedule out = s;
  for (std::size_t j = 0; j < occupancy.size(); ++j) {
    out.counts[j] = std::min(s.counts[j], occupancy[j]);
  }
  return out;
}

void PolicySpec::validate(std::size_t J, int K) const {
  if (p.empty()) throw std::invalid_argument("PolicySpec: empty distribution");
  double mass = 0.0;
  for (const auto& ws : p) {
    if (ws.s.num_classes() != J) throw std::invalid_argument("PolicySpec: schedule length");
    if (ws.s.total() > K) throw std::invalid_argument("PolicySpec: schedule exceeds K");
    for (int c : ws.s.counts) {
      if (c < 0) throw std::invalid_argument("PolicySpec: negative count");
    }
    if (!(ws.w >= 0.0) || !std::isfinite(ws.w)) {
      throw std::invalid_argument("PolicySpec: bad weight");
    }
    mass += ws.w;
  }
  if (std::fabs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("PolicySpec: weights must sum to 1");
  }
  if (tie_break == TieBreak::MaxWeight && schedule_weight.size() != p.size()) {
    throw std::invalid_argument("PolicySpec: MaxWeight requires schedule_weight");
  }
}

std::vector<WeightedSchedule> induced_distribution(const PolicySpec& policy,
                                                   const std::vector<int>& occupancy) {
  std::map<std::vector<int>, double> acc;
  for (const auto& ws : policy.p) {
    if (ws.w == 0.0) continue;
    Schedule img = maximal_subschedule(ws.s, occupancy);
    acc[img.counts] += ws.w;
  }
  std::vector<WeightedSchedule> out;
  out.reserve(acc.size());
  for (auto& [counts, w] : acc) {
    out.push_back({Schedule(counts), w});
  }
  return out;
}

std::size_t sample_index(const std::vector<double>& weights, std::mt19937_64& rng) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("sample_index: no positive weight");
  const double u = (rng() >> 11) * 0x1.0p-53 * total;
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cum += weights[i];
    last = i;
    if (u < cum) return i;
  }
  return last;
}

namespace {

// Any schedule serving exactly K among the present messages. Exists whenever
// the backlog holds at least K messages.
Schedule greedy_full_schedule(const std::vector<int>& occupancy, int K) {
  Schedule s(std::vector<int>(occupancy.size(), 0));
  int left = K;
  for (std::size_t j = 0; j < occupancy.size() && left > 0; ++j) {
    const int take = std::min(occupancy[j], left);
    s.counts[j] = take;
    left -= take;
  }
  return s;
}

}  // namespace

Schedule choose_schedule(const PolicySpec& policy, const std::vector<int>& occupancy, int K,
                         std::mt19937_64& rng) {
  const std::size_t J = occupancy.size();
  const int backlog = std::accumulate(occupancy.begin(), occupancy.end(), 0);
  if (policy.kind == PolicyKind::StateIndependent) {
    std::vector<double> w(policy.p.size());
    for (std::size_t i = 0; i < policy.p.size(); ++i) w[i] = policy.p[i].w;
    const std::size_t pick = sample_index(w, rng);
    return maximal_subschedule(policy.p[pick].s, occupancy);
  }
  if (policy.kind != PolicyKind::NonIdling) {
    throw std::invalid_argument("choose_schedule: subclass policies are resolved by the engine");
  }
  if (backlog < K) {
    // Below the service limit every present message is scheduled.
    return Schedule(std::vector<int>(occupancy));
  }
  // Restrict the base distribution to feasible schedules of total exactly K.
  std::vector<double> w(policy.p.size(), 0.0);
  bool any = false;
  double best = -1.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < policy.p.size(); ++i) {
    const Schedule& s = policy.p[i].s;
    if (s.total() != K) continue;
    bool feasible = true;
    for (std::size_t j = 0; j < J; ++j) {
      if (s.counts[j] > occupancy[j]) feasible = false;
    }
    if (!feasible) continue;
    any = true;
    if (policy.tie_break == TieBreak::MaxWeight) {
      const double sw = policy.schedule_weight[i];
      if (sw > best) {
        best = sw;
        best_idx = i;
      }
    } else {
      w[i] = policy.p[i].w;
    }
  }
  if (policy.tie_break == TieBreak::MaxWeight && any) {
    return policy.p[best_idx].s;
  }
  if (any && std::accumulate(w.begin(), w.end(), 0.0) > 0.0) {
    return policy.p[sample_index(w, rng)].s;
  }
  // Base distribution puts no usable mass here; any feasible full schedule
  // keeps the policy non-idling.
  return greedy_full_schedule(occupancy, K);
}

bool SubclassControls::eta_nonempty() const {
  for (int v : eta) {
    if (v > 0) return true;
  }
  return false;
}

SubclassControls subclass_controls(const std::vector<std::vector<std::int64_t>>& residuals,
                                   const Schedule& s, std::int64_t codeword_length) {
  if (residuals.size() != s.num_classes()) {
    throw std::invalid_argument("subclass_controls: dimension mismatch");
  }
  SubclassControls out;
  const std::size_t J = s.num_classes();
  out.eta.assign(J, 0);
  out.beta.assign(J, 0);
  out.zstar.assign(J, 0);
  for (std::size_t j = 0; j < J; ++j) {
    if (s.counts[j] == 0) continue;
    for (std::int64_t x : residuals[j]) {
      if (x < codeword_length) {
        ++out.eta[j];
      } else {
        ++out.beta[j];
      }
    }
    out.zstar[j] = std::min<std::int64_t>(s.counts[j],
                                          static_cast<std::int64_t>(residuals[j].size()));
  }
  return out;
}

}  // namespace schedcomm
