#ifndef SCHEDCOMM_TEST_UTIL_HPP
#define SCHEDCOMM_TEST_UTIL_HPP

#include <cmath>
#include <random>
#include <vector>

#include "schedcomm/channel.hpp"

namespace testutil {

using schedcomm::DegradedBroadcastSpec;
using schedcomm::DiscreteChannel;
using schedcomm::DiscreteMac;
using schedcomm::InputDistribution;

// A probability row that sums to 1 exactly enough for the 1e-12 gate, with
// every entry bounded away from zero.
inline std::vector<double> random_row(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> row(n);
  double sum = 0.0;
  for (double& v : row) {
    v = u(rng);
    sum += v;
  }
  for (double& v : row) v /= sum;
  double resum = 0.0;
  for (double v : row) resum += v;
  row[0] -= resum - 1.0;
  return row;
}

inline DiscreteChannel random_channel(std::size_t nx, std::size_t ny, std::mt19937_64& rng) {
  std::vector<double> p;
  p.reserve(nx * ny);
  for (std::size_t x = 0; x < nx; ++x) {
    const auto row = random_row(ny, rng);
    p.insert(p.end(), row.begin(), row.end());
  }
  return DiscreteChannel(nx, ny, std::move(p));
}

inline DiscreteMac random_mac(const std::vector<std::size_t>& inputs, std::size_t ny,
                              std::mt19937_64& rng) {
  std::size_t joint = 1;
  for (std::size_t sz : inputs) joint *= sz;
  std::vector<double> p;
  p.reserve(joint * ny);
  for (std::size_t m = 0; m < joint; ++m) {
    const auto row = random_row(ny, rng);
    p.insert(p.end(), row.begin(), row.end());
  }
  return DiscreteMac(inputs, ny, std::move(p));
}

inline DegradedBroadcastSpec random_dbc(std::size_t receivers, std::mt19937_64& rng) {
  DegradedBroadcastSpec spec;
  spec.input_sizes.assign(receivers, 2);
  spec.output_sizes.assign(receivers, 2);
  spec.first_hop = random_channel(2, 2, rng);
  for (std::size_t l = 0; l + 1 < receivers; ++l) {
    spec.degradations.push_back(random_channel(2, 2, rng));
    spec.ladder.push_back(random_channel(2, 2, rng));
  }
  spec.top_marginal = random_row(2, rng);
  spec.validate();
  return spec;
}

// Joint law p(x_1..x_J, y) of a multiaccess channel under a product input
// distribution; an independent route for information quantities.
struct JointTable {
  std::vector<double> p;  // [joint_x * ny + y]
  std::size_t joint = 0;
  std::size_t ny = 0;
};

inline JointTable joint_table(const DiscreteMac& ch, const InputDistribution& q) {
  JointTable t;
  t.joint = ch.num_joint_inputs();
  t.ny = ch.num_outputs;
  t.p.assign(t.joint * t.ny, 0.0);
  std::vector<std::size_t> x(ch.num_sources());
  for (std::size_t m = 0; m < t.joint; ++m) {
    ch.decode_joint(m, x);
    double w = 1.0;
    for (std::size_t j = 0; j < ch.num_sources(); ++j) w *= q.q[j][x[j]];
    for (std::size_t y = 0; y < t.ny; ++y) t.p[m * t.ny + y] = w * ch.at(m, y);
  }
  return t;
}

// I(X(S); Y | X(S^c)) from the joint law via the entropy chain
// H(Y|X(S^c)) - H(Y|X): an independent oracle for the implementation.
inline double conditional_mi_oracle(const DiscreteMac& ch, const InputDistribution& q,
                                    std::uint32_t subset) {
  const JointTable t = joint_table(ch, q);
  const std::size_t J = ch.num_sources();
  // H(Y|X): - sum p(x,y) ln p(y|x)
  double hyx = 0.0;
  for (std::size_t m = 0; m < t.joint; ++m) {
    for (std::size_t y = 0; y < t.ny; ++y) {
      const double pxy = t.p[m * t.ny + y];
      if (pxy > 0.0) hyx -= pxy * std::log(ch.at(m, y));
    }
  }
  // group by x(S^c)
  std::vector<std::size_t> x(J);
  std::vector<double> group(t.joint * t.ny, 0.0);  // keyed with S coords zeroed
  std::vector<double> group_mass(t.joint, 0.0);
  for (std::size_t m = 0; m < t.joint; ++m) {
    ch.decode_joint(m, x);
    for (std::size_t j = 0; j < J; ++j) {
      if (subset & (1u << j)) x[j] = 0;
    }
    const std::size_t key = ch.joint_index(x);
    for (std::size_t y = 0; y < t.ny; ++y) {
      group[key * t.ny + y] += t.p[m * t.ny + y];
      group_mass[key] += t.p[m * t.ny + y];
    }
  }
  double hy_given_comp = 0.0;
  for (std::size_t key = 0; key < t.joint; ++key) {
    if (group_mass[key] <= 0.0) continue;
    for (std::size_t y = 0; y < t.ny; ++y) {
      const double pv = group[key * t.ny + y];
      if (pv > 0.0) hy_given_comp -= pv * std::log(pv / group_mass[key]);
    }
  }
  return hy_given_comp - hyx;
}

// Literal evaluation of the joint-decoding exponent
// -ln sum_{x(S^c)} Q_{S^c} sum_y [sum_{x(S)} Q_S p(y|x)^{1/(1+rho)}]^{1+rho}
// by walking the full joint input space for every (complement letters, y).
inline double mac_subset_exponent_oracle(const DiscreteMac& ch, const InputDistribution& q,
                                         std::uint32_t subset, double rho) {
  const std::size_t J = ch.num_sources();
  const std::size_t joint = ch.num_joint_inputs();
  std::vector<std::size_t> x(J);
  double g = 0.0;
  // enumerate complement assignments as full joint inputs with subset
  // coordinates pinned to zero
  for (std::size_t mc = 0; mc < joint; ++mc) {
    ch.decode_joint(mc, x);
    bool canonical = true;
    double qc = 1.0;
    for (std::size_t j = 0; j < J; ++j) {
      if (subset & (1u << j)) {
        if (x[j] != 0) canonical = false;
      } else {
        qc *= q.q[j][x[j]];
      }
    }
    if (!canonical) continue;
    std::vector<std::size_t> base = x;
    double inner_total = 0.0;
    for (std::size_t y = 0; y < ch.num_outputs; ++y) {
      double a = 0.0;
      for (std::size_t ms = 0; ms < joint; ++ms) {
        ch.decode_joint(ms, x);
        bool matches = true;
        double qs = 1.0;
        for (std::size_t j = 0; j < J; ++j) {
          if (subset & (1u << j)) {
            qs *= q.q[j][x[j]];
          } else if (x[j] != base[j]) {
            matches = false;
          }
        }
        if (!matches) continue;
        a += qs * std::pow(ch.at(ms, y), 1.0 / (1.0 + rho));
      }
      inner_total += std::pow(a, 1.0 + rho);
    }
    g += qc * inner_total;
  }
  return -std::log(g);
}

// p(y_j | x_k) by exhaustive summation over all hidden ladder letters and
// intermediate outputs.
inline double dbc_effective_entry_oracle(const DegradedBroadcastSpec& spec, std::size_t k,
                                         std::size_t j, std::size_t xk, std::size_t yj) {
  // enumerate x_{k-1}..x_0 and y_0..y_{j-1}
  std::vector<std::size_t> xs(k + 1, 0);
  xs[k] = xk;
  double total = 0.0;
  std::vector<std::size_t> hidden_x(k, 0);
  const auto count_x = [&]() {
    std::size_t n = 1;
    for (std::size_t t = 0; t < k; ++t) n *= spec.input_sizes[t];
    return n;
  }();
  for (std::size_t mx = 0; mx < count_x; ++mx) {
    std::size_t rem = mx;
    for (std::size_t t = 0; t < k; ++t) {
      hidden_x[t] = rem % spec.input_sizes[t];
      rem /= spec.input_sizes[t];
    }
    double wx = 1.0;
    std::size_t upper = xk;
    for (std::size_t t = k; t-- > 0;) {
      wx *= spec.ladder[t].at(upper, hidden_x[t]);
      upper = hidden_x[t];
    }
    if (wx == 0.0) continue;
    // sum over intermediate outputs y_0..y_{j-1}
    std::size_t count_y = 1;
    for (std::size_t l = 0; l < j; ++l) count_y *= spec.output_sizes[l];
    for (std::size_t my = 0; my < count_y; ++my) {
      std::size_t remy = my;
      std::vector<std::size_t> ys(j, 0);
      for (std::size_t l = 0; l < j; ++l) {
        ys[l] = remy % spec.output_sizes[l];
        remy /= spec.output_sizes[l];
      }
      double wy = spec.first_hop.at(k == 0 ? xk : hidden_x[0], j == 0 ? yj : ys[0]);
      for (std::size_t l = 1; l <= j; ++l) {
        wy *= spec.degradations[l - 1].at(ys[l - 1], l == j ? yj : ys[l]);
      }
      total += wx * wy;
    }
  }
  return total;
}

}  // namespace testutil

#endif
