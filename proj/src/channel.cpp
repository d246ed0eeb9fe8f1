#include "schedcomm/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace schedcomm {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

namespace {

void check_rows(const std::vector<double>& p, std::size_t rows, std::size_t cols,
                const char* what) {
  if (p.size() != rows * cols) {
    throw std::invalid_argument(std::string(what) + ": matrix size mismatch");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = p[r * cols + c];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + ": negative or non-finite entry");
      }
      sum += v;
    }
    if (std::fabs(sum - 1.0) > kProbTol) {
      throw std::invalid_argument(std::string(what) + ": row " + std::to_string(r) +
                                  " sums to " + std::to_string(sum));
    }
  }
}

void check_dist(const std::vector<double>& q, const char* what) {
  check_rows(q, 1, q.size(), what);
}

}  // namespace

DiscreteChannel::DiscreteChannel(std::size_t inputs, std::size_t outputs,
                                 std::vector<double> probs)
    : num_inputs(inputs), num_outputs(outputs), p(std::move(probs)) {
  if (num_inputs == 0 || num_outputs == 0) {
    throw std::invalid_argument("DiscreteChannel: empty alphabet");
  }
  check_rows(p, num_inputs, num_outputs, "DiscreteChannel");
}

DiscreteChannel DiscreteChannel::binary_symmetric(double crossover) {
  if (crossover < 0.0 || crossover > 1.0) {
    throw std::invalid_argument("binary_symmetric: crossover outside [0,1]");
  }
  return DiscreteChannel(2, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
}

DiscreteChannel DiscreteChannel::identity(std::size_t n) {
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) p[i * n + i] = 1.0;
  return DiscreteChannel(n, n, std::move(p));
}

DiscreteMac::DiscreteMac(std::vector<std::size_t> inputs, std::size_t outputs,
                         std::vector<double> probs)
    : input_sizes(std::move(inputs)), num_outputs(outputs), p(std::move(probs)) {
  if (input_sizes.empty() || num_outputs == 0) {
    throw std::invalid_argument("DiscreteMac: empty alphabet");
  }
  for (std::size_t sz : input_sizes) {
    if (sz == 0) throw std::invalid_argument("DiscreteMac: empty input alphabet");
  }
  check_rows(p, num_joint_inputs(), num_outputs, "DiscreteMac");
}

std::size_t DiscreteMac::num_joint_inputs() const {
  std::size_t n = 1;
  for (std::size_t sz : input_sizes) n *= sz;
  return n;
}

std::size_t DiscreteMac::joint_index(std::span<const std::size_t> x) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < input_sizes.size(); ++j) {
    idx = idx * input_sizes[j] + x[j];
  }
  return idx;
}

void DiscreteMac::decode_joint(std::size_t joint, std::span<std::size_t> x) const {
  for (std::size_t j = input_sizes.size(); j-- > 0;) {
    x[j] = joint % input_sizes[j];
    joint /= input_sizes[j];
  }
}

DiscreteMac DiscreteMac::binary_adder(std::size_t sources) {
  std::vector<std::size_t> in(sources, 2);
  const std::size_t joint = std::size_t{1} << sources;
  const std::size_t outs = sources + 1;
  std::vector<double> p(joint * outs, 0.0);
  for (std::size_t m = 0; m < joint; ++m) {
    std::size_t sum = 0;
    for (std::size_t j = 0; j < sources; ++j) sum += (m >> (sources - 1 - j)) & 1u;
    p[m * outs + sum] = 1.0;
  }
  return DiscreteMac(std::move(in), outs, std::move(p));
}

DiscreteMac DiscreteMac::parallel(const std::vector<DiscreteChannel>& chans) {
  std::vector<std::size_t> in;
  std::size_t outs = 1;
  for (const auto& c : chans) {
    in.push_back(c.num_inputs);
    outs *= c.num_outputs;
  }
  DiscreteMac mac;
  mac.input_sizes = in;
  mac.num_outputs = outs;
  const std::size_t joint = [&] {
    std::size_t n = 1;
    for (std::size_t sz : in) n *= sz;
    return n;
  }();
  mac.p.assign(joint * outs, 0.0);
  std::vector<std::size_t> x(chans.size());
  for (std::size_t m = 0; m < joint; ++m) {
    mac.decode_joint(m, x);
    for (std::size_t y = 0; y < outs; ++y) {
      std::size_t rem = y;
      double prob = 1.0;
      for (std::size_t j = chans.size(); j-- > 0;) {
        const std::size_t yj = rem % chans[j].num_outputs;
        rem /= chans[j].num_outputs;
        prob *= chans[j].at(x[j], yj);
      }
      mac.p[m * outs + y] = prob;
    }
  }
  check_rows(mac.p, joint, outs, "DiscreteMac::parallel");
  return mac;
}

InputDistribution::InputDistribution(std::vector<std::vector<double>> dists)
    : q(std::move(dists)) {
  for (const auto& d : q) check_dist(d, "InputDistribution");
}

InputDistribution InputDistribution::uniform(const std::vector<std::size_t>& sizes) {
  InputDistribution out;
  for (std::size_t sz : sizes) {
    out.q.emplace_back(sz, 1.0 / static_cast<double>(sz));
  }
  return out;
}

void DegradedBroadcastSpec::validate() const {
  const std::size_t J = num_receivers();
  if (J == 0) throw std::invalid_argument("DegradedBroadcastSpec: no receivers");
  if (output_sizes.size() != J || degradations.size() + 1 != J || ladder.size() + 1 != J) {
    throw std::invalid_argument("DegradedBroadcastSpec: inconsistent stage counts");
  }
  if (first_hop.num_inputs != input_sizes[0] || first_hop.num_outputs != output_sizes[0]) {
    throw std::invalid_argument("DegradedBroadcastSpec: first hop shape");
  }
  for (std::size_t l = 0; l + 1 < J; ++l) {
    if (degradations[l].num_inputs != output_sizes[l] ||
        degradations[l].num_outputs != output_sizes[l + 1]) {
      throw std::invalid_argument("DegradedBroadcastSpec: degradation shape");
    }
    if (ladder[l].num_inputs != input_sizes[l + 1] ||
        ladder[l].num_outputs != input_sizes[l]) {
      throw std::invalid_argument("DegradedBroadcastSpec: ladder shape");
    }
  }
  check_dist(top_marginal, "DegradedBroadcastSpec: top marginal");
  if (top_marginal.size() != input_sizes[J - 1]) {
    throw std::invalid_argument("DegradedBroadcastSpec: top marginal size");
  }
}

std::vector<double> DegradedBroadcastSpec::input_marginal(std::size_t k) const {
  const std::size_t J = num_receivers();
  if (k >= J) throw std::invalid_argument("input_marginal: bad level");
  std::vector<double> m = top_marginal;
  for (std::size_t level = J - 1; level > k; --level) {
    // push through Q(x_{level-1} | x_level)
    const DiscreteChannel& Q = ladder[level - 1];
    std::vector<double> next(Q.num_outputs, 0.0);
    for (std::size_t xu = 0; xu < Q.num_inputs; ++xu) {
      for (std::size_t xl = 0; xl < Q.num_outputs; ++xl) {
        next[xl] += m[xu] * Q.at(xu, xl);
      }
    }
    m = std::move(next);
  }
  return m;
}

DegradedBroadcastSpec DegradedBroadcastSpec::binary_cascade(
    double eps1, double eps2, const std::vector<double>& ladder_rows,
    const std::vector<double>& top) {
  DegradedBroadcastSpec spec;
  spec.input_sizes = {2, 2};
  spec.output_sizes = {2, 2};
  spec.first_hop = DiscreteChannel::binary_symmetric(eps1);
  spec.degradations = {DiscreteChannel::binary_symmetric(eps2)};
  spec.ladder = {DiscreteChannel(2, 2, ladder_rows)};
  spec.top_marginal = top;
  spec.validate();
  return spec;
}

GaussianMacSpec::GaussianMacSpec(std::vector<double> snrs) : snr(std::move(snrs)) {
  if (snr.empty()) throw std::invalid_argument("GaussianMacSpec: no classes");
  for (double g : snr) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("GaussianMacSpec: snr must be finite and positive");
    }
  }
}

double mutual_information(const DiscreteChannel& ch, const std::vector<double>& q) {
  if (q.size() != ch.num_inputs) {
    throw std::invalid_argument("mutual_information: dimension mismatch");
  }
  check_dist(q, "mutual_information");
  std::vector<double> py(ch.num_outputs, 0.0);
  for (std::size_t x = 0; x < ch.num_inputs; ++x) {
    for (std::size_t y = 0; y < ch.num_outputs; ++y) py[y] += q[x] * ch.at(x, y);
  }
  double mi = 0.0;
  for (std::size_t x = 0; x < ch.num_inputs; ++x) {
    if (q[x] == 0.0) continue;
    for (std::size_t y = 0; y < ch.num_outputs; ++y) {
      const double pxy = q[x] * ch.at(x, y);
      if (pxy > 0.0) mi += pxy * std::log(ch.at(x, y) / py[y]);
    }
  }
  return mi;
}

double mac_conditional_mi(const DiscreteMac& ch, const InputDistribution& q,
                          std::uint32_t subset) {
  const std::size_t J = ch.num_sources();
  if (subset == 0 || subset >= (std::uint32_t{1} << J)) {
    throw std::invalid_argument("mac_conditional_mi: subset must be a non-empty subset");
  }
  if (q.num_sources() != J) {
    throw std::invalid_argument("mac_conditional_mi: distribution/channel mismatch");
  }
  const std::size_t joint = ch.num_joint_inputs();
  const std::size_t ny = ch.num_outputs;

  // Complement-conditional output law p(y | x(S^c)) keyed by the joint index
  // with subset coordinates frozen to 0.
  std::vector<double> cond(joint * ny, 0.0);
  std::vector<double> qjoint(joint, 0.0);
  std::vector<std::size_t> x(J);
  for (std::size_t m = 0; m < joint; ++m) {
    ch.decode_joint(m, x);
    double w = 1.0;
    for (std::size_t j = 0; j < J; ++j) w *= q.q[j][x[j]];
    qjoint[m] = w;
  }
  std::vector<std::size_t> xc(J);
  for (std::size_t m = 0; m < joint; ++m) {
    if (qjoint[m] == 0.0) continue;
    ch.decode_joint(m, xc);
    for (std::size_t j = 0; j < J; ++j) {
      if (subset & (1u << j)) xc[j] = 0;
    }
    const std::size_t key = ch.joint_index(xc);
    for (std::size_t y = 0; y < ny; ++y) cond[key * ny + y] += qjoint[m] * ch.at(m, y);
  }
  // Normalize by the complement marginal Q(x(S^c)).
  for (std::size_t m = 0; m < joint; ++m) {
    ch.decode_joint(m, x);
    bool is_key = true;
    for (std::size_t j = 0; j < J; ++j) {
      if ((subset & (1u << j)) && x[j] != 0) is_key = false;
    }
    if (!is_key) continue;
    double qc = 1.0;
    for (std::size_t j = 0; j < J; ++j) {
      if (!(subset & (1u << j))) qc *= q.q[j][x[j]];
    }
    if (qc > 0.0) {
      for (std::size_t y = 0; y < ny; ++y) cond[m * ny + y] /= qc;
    }
  }

  double mi = 0.0;
  for (std::size_t m = 0; m < joint; ++m) {
    if (qjoint[m] == 0.0) continue;
    ch.decode_joint(m, xc);
    for (std::size_t j = 0; j < J; ++j) {
      if (subset & (1u << j)) xc[j] = 0;
    }
    const std::size_t key = ch.joint_index(xc);
    for (std::size_t y = 0; y < ny; ++y) {
      const double pyx = ch.at(m, y);
      if (pyx > 0.0) {
        mi += qjoint[m] * pyx * std::log(pyx / cond[key * ny + y]);
      }
    }
  }
  return mi;
}

DiscreteChannel dbc_effective_channel(const DegradedBroadcastSpec& spec, std::size_t k,
                                      std::size_t j) {
  spec.validate();
  const std::size_t J = spec.num_receivers();
  if (j >= J || k >= J || k < j) {
    throw std::invalid_argument("dbc_effective_channel: need j <= k < J");
  }
  // p(x_0 | x_k): push the ladder down from level k.
  const std::size_t nk = spec.input_sizes[k];
  std::vector<double> down(nk * spec.input_sizes[0], 0.0);
  if (k == 0) {
    for (std::size_t i = 0; i < nk; ++i) down[i * nk + i] = 1.0;
  } else {
    // start with Q(x_{k-1} | x_k)
    std::vector<double> cur = spec.ladder[k - 1].p;
    std::size_t cur_cols = spec.input_sizes[k - 1];
    for (std::size_t level = k - 1; level > 0; --level) {
      const DiscreteChannel& Q = spec.ladder[level - 1];
      std::vector<double> next(nk * Q.num_outputs, 0.0);
      for (std::size_t a = 0; a < nk; ++a) {
        for (std::size_t b = 0; b < cur_cols; ++b) {
          const double w = cur[a * cur_cols + b];
          if (w == 0.0) continue;
          for (std::size_t c = 0; c < Q.num_outputs; ++c) {
            next[a * Q.num_outputs + c] += w * Q.at(b, c);
          }
        }
      }
      cur = std::move(next);
      cur_cols = Q.num_outputs;
    }
    down = std::move(cur);
  }
  // compose with the first hop and then j degradation stages
  std::vector<double> cur(nk * spec.output_sizes[0], 0.0);
  for (std::size_t a = 0; a < nk; ++a) {
    for (std::size_t x0 = 0; x0 < spec.input_sizes[0]; ++x0) {
      const double w = down[a * spec.input_sizes[0] + x0];
      if (w == 0.0) continue;
      for (std::size_t y = 0; y < spec.output_sizes[0]; ++y) {
        cur[a * spec.output_sizes[0] + y] += w * spec.first_hop.at(x0, y);
      }
    }
  }
  std::size_t cur_cols = spec.output_sizes[0];
  for (std::size_t l = 0; l < j; ++l) {
    const DiscreteChannel& D = spec.degradations[l];
    std::vector<double> next(nk * D.num_outputs, 0.0);
    for (std::size_t a = 0; a < nk; ++a) {
      for (std::size_t b = 0; b < cur_cols; ++b) {
        const double w = cur[a * cur_cols + b];
        if (w == 0.0) continue;
        for (std::size_t c = 0; c < D.num_outputs; ++c) {
          next[a * D.num_outputs + c] += w * D.at(b, c);
        }
      }
    }
    cur = std::move(next);
    cur_cols = D.num_outputs;
  }
  return DiscreteChannel(nk, cur_cols, std::move(cur));
}

std::vector<RateConstraint> mac_pentagon(const DiscreteMac& ch, const InputDistribution& q) {
  const std::size_t J = ch.num_sources();
  std::vector<RateConstraint> out;
  out.reserve((std::size_t{1} << J) - 1);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << J); ++mask) {
    out.push_back({mask, mac_conditional_mi(ch, q, mask)});
  }
  return out;
}

double dbc_conditional_mi(const DegradedBroadcastSpec& spec, std::size_t k, std::size_t j) {
  const std::size_t J = spec.num_receivers();
  if (k >= J || j > k) throw std::invalid_argument("dbc_conditional_mi: need j <= k < J");
  const DiscreteChannel eff = dbc_effective_channel(spec, k, j);
  if (k + 1 == J) {
    return mutual_information(eff, spec.top_marginal);
  }
  // I(X_k; Y_j | X_{k+1}): average the per-conditioning-letter MI of the
  // effective channel under Q(x_k | x_{k+1}).
  const DiscreteChannel& Q = spec.ladder[k];  // X_{k+1} -> X_k
  const std::vector<double> upper = spec.input_marginal(k + 1);
  double mi = 0.0;
  for (std::size_t xu = 0; xu < Q.num_inputs; ++xu) {
    if (upper[xu] == 0.0) continue;
    std::vector<double> qk(Q.num_outputs);
    for (std::size_t xk = 0; xk < Q.num_outputs; ++xk) qk[xk] = Q.at(xu, xk);
    mi += upper[xu] * mutual_information(eff, qk);
  }
  return mi;
}

std::vector<double> dbc_rate_constraints(const DegradedBroadcastSpec& spec) {
  const std::size_t J = spec.num_receivers();
  std::vector<double> out(J);
  for (std::size_t j = 0; j < J; ++j) out[j] = dbc_conditional_mi(spec, j, j);
  return out;
}

}  // namespace schedcomm
