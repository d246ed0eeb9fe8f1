#include <doctest.h>

#include <cmath>
#include <limits>

#include "schedcomm/codelen.hpp"
#include "test_util.hpp"

using namespace schedcomm;

namespace {
const double kLn2 = std::log(2.0);

// smallest N with chi(N) <= p_e by walking up from 1
std::int64_t linear_scan(const std::function<double(std::int64_t)>& chi, double p_e,
                         std::int64_t cap = 2000000) {
  for (std::int64_t n = 1; n <= cap; ++n) {
    if (chi(n) <= p_e) return n;
  }
  return -1;
}

DiscreteMac bsc_as_mac(double eps) {
  return DiscreteMac({2}, 2, DiscreteChannel::binary_symmetric(eps).p);
}
}  // namespace

TEST_CASE("service requirements") {
  CHECK(service_requirement({2, 1e-3, 0.0}, RhoParam(1.0)) ==
        doctest::Approx(7.60090).epsilon(1e-5));
  CHECK(service_requirement({2, std::exp(-1.0), 0.0}, RhoParam(1.0)) ==
        doctest::Approx(1.0 + kLn2));
  // the alphabet term dominates as M grows: the gap to rho is exactly
  // -ln(p_e)/ln(M) and halves whenever the exponent doubles
  for (double rho : {0.3, 1.0}) {
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int bits : {10, 20, 40}) {
      const MessageClass big{std::uint64_t{1} << bits, 1e-3, 0.0};
      const double gap =
          service_requirement(big, RhoParam(rho)) / big.log_alphabet() - rho;
      CHECK(gap == doctest::Approx(-std::log(1e-3) / big.log_alphabet()));
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
  }
  CHECK_THROWS_AS(service_requirement({1, 1e-3, 0.0}, RhoParam(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(service_requirement({4, 1.0, 0.0}, RhoParam(1.0)), std::invalid_argument);
}

TEST_CASE("ceiling to a multiple") {
  CHECK(ceil_multiple_count(7.6009, 0.22314) == 35);
  CHECK(ceil_multiple_count(0.5, 1.0) == 1);
  CHECK(ceil_multiple_count(1.0, 1.0) == 1);   // exact multiple stays put
  CHECK(ceil_multiple_count(2.0, 1.0) == 2);
  CHECK(ceil_multiple_count(2.0 + 1e-13, 1.0) == 2);  // slack absorbs float fuzz
  CHECK(ceil_to_multiple(0.3, 0.22314) == doctest::Approx(2 * 0.22314));
}

TEST_CASE("joint error bound") {
  const auto q2 = InputDistribution::uniform({2, 2});
  const std::vector<MessageClass> classes{{2, 1e-3, 0.0}, {2, 1e-3, 0.0}};

  SUBCASE("single active source collapses to one term") {
    const auto mac = bsc_as_mac(0.1);
    const std::vector<MessageClass> one{{2, 1e-3, 0.0}};
    const auto q1 = InputDistribution::uniform({2});
    const double e0 = e0_mac_subset(mac, q1, 1, RhoParam(1.0));
    for (std::int64_t n : {1, 10, 40}) {
      CHECK(chi_mac(mac, q1, one, Schedule({1}), RhoParam(1.0), n) ==
            doctest::Approx(std::exp(kLn2 - n * e0)));
    }
  }

  SUBCASE("strictly decreasing in the codeword length") {
    const auto adder = DiscreteMac::binary_adder(2);
    MacChiEvaluator eval(adder, q2, classes, Schedule({1, 1}), RhoParam(1.0));
    double prev = eval.chi(1);
    for (std::int64_t n = 2; n < 60; ++n) {
      const double cur = eval.chi(n);
      CHECK(cur < prev);
      prev = cur;
    }
  }

  SUBCASE("term-by-term against the three subsets") {
    const auto adder = DiscreteMac::binary_adder(2);
    const RhoParam rho(1.0);
    const std::int64_t n = 40;
    double expected = 0.0;
    for (std::uint32_t mask = 1; mask < 4; ++mask) {
      double rate = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        if (mask & (1u << j)) rate += kLn2;
      }
      expected += std::exp(rho.value * rate - n * e0_mac_subset(adder, q2, mask, rho));
    }
    CHECK(chi_mac(adder, q2, classes, Schedule({1, 1}), rho, n) == doctest::Approx(expected));
  }

  SUBCASE("empty schedule is rejected") {
    const auto adder = DiscreteMac::binary_adder(2);
    CHECK_THROWS_AS(chi_mac(adder, q2, classes, Schedule({0, 0}), RhoParam(1.0), 5),
                    std::invalid_argument);
  }
}

TEST_CASE("minimal codeword length, single class") {
  const auto mac = bsc_as_mac(0.1);
  const auto q = InputDistribution::uniform({2});
  const std::vector<MessageClass> classes{{2, 1e-3, 0.0}};
  const auto res = min_codeword_length_mac(mac, q, classes, Schedule({1}), RhoParam(1.0), 1e-3);
  CHECK(res.n == 35);
  CHECK(res.chi_at_n <= 1e-3);
  CHECK(res.chi_before > 1e-3);
  CHECK(res.bracket_lo <= 35);
  CHECK(res.bracket_hi >= 35);
  CHECK(!res.bracket_anomaly);
}

TEST_CASE("minimal codeword length equals a scan and sits in the bracket") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> msize(2, 8);
  std::uniform_real_distribution<double> perr(-4.0, -1.0);
  std::uniform_real_distribution<double> rho_draw(0.15, 1.0);
  std::uniform_int_distribution<int> cnt(0, 2);
  int done = 0;
  while (done < 12) {
    const auto mac = testutil::random_mac({2, 2}, 3, rng);
    const auto q = InputDistribution(
        {testutil::random_row(2, rng), testutil::random_row(2, rng)});
    const std::vector<MessageClass> classes{
        {static_cast<std::uint64_t>(msize(rng)), std::pow(10.0, perr(rng)), 0.0},
        {static_cast<std::uint64_t>(msize(rng)), std::pow(10.0, perr(rng)), 0.0}};
    Schedule s({cnt(rng), cnt(rng)});
    if (s.is_empty()) continue;
    const RhoParam rho(rho_draw(rng));
    const double p_e = std::min(classes[0].target_error, classes[1].target_error);
    MacChiEvaluator eval(mac, q, classes, s, rho);
    try {
      eval.require_feasible();
    } catch (const InfeasibleExponent&) {
      continue;
    }
    const auto res = min_codeword_length_mac(mac, q, classes, s, rho, p_e);
    const std::int64_t scan = linear_scan([&](std::int64_t n) { return eval.chi(n); }, p_e);
    CHECK(res.n == scan);
    CHECK(res.bracket_lo <= res.n);
    CHECK(res.n <= res.bracket_hi);
    CHECK(res.chi_at_n <= p_e);
    CHECK(res.chi_before > p_e);
    ++done;
  }
}

TEST_CASE("doubling the alphabet never shortens the codeword") {
  const auto adder = DiscreteMac::binary_adder(2);
  const auto q = InputDistribution::uniform({2, 2});
  std::int64_t prev = 0;
  for (std::uint64_t m : {2, 4, 8, 16, 64}) {
    const std::vector<MessageClass> classes{{m, 1e-2, 0.0}, {2, 1e-2, 0.0}};
    const auto res =
        min_codeword_length_mac(adder, q, classes, Schedule({1, 1}), RhoParam(0.5), 1e-2);
    CHECK(res.n >= prev);
    prev = res.n;
  }
}

TEST_CASE("the joint bound also covers each individual message") {
  // the terms of subsets containing class j sum to j's error bound and never
  // exceed the full joint bound
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mac = testutil::random_mac({2, 2}, 3, rng);
    const auto q = InputDistribution::uniform({2, 2});
    const std::vector<MessageClass> classes{{4, 1e-2, 0.0}, {2, 1e-2, 0.0}};
    MacChiEvaluator eval(mac, q, classes, Schedule({1, 1}), RhoParam(0.6));
    for (std::int64_t n : {5, 20, 80}) {
      const double full = eval.chi(n);
      for (std::size_t j = 0; j < 2; ++j) {
        double individual = 0.0;
        for (std::uint32_t mask = 1; mask < 4; ++mask) {
          if (mask & (1u << j)) {
            individual += std::exp(eval.subset_rate_nats(mask) -
                                   static_cast<double>(n) * eval.subset_exponent(mask));
          }
        }
        CHECK(individual <= full + 1e-15);
        CHECK(individual > 0.0);
      }
    }
  }
}

TEST_CASE("restricted bound never exceeds the full bound") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mac = testutil::random_mac({2, 2, 2}, 4, rng);
    const auto q = InputDistribution::uniform({2, 2, 2});
    const std::vector<MessageClass> classes{{4, 1e-2, 0.0}, {2, 1e-2, 0.0}, {2, 1e-2, 0.0}};
    MacChiEvaluator eval(mac, q, classes, Schedule({1, 1, 1}), RhoParam(0.7));
    try {
      eval.require_feasible();
    } catch (const InfeasibleExponent&) {
      continue;
    }
    const auto res = min_codeword_length_mac(mac, q, classes, Schedule({1, 1, 1}),
                                             RhoParam(0.7), 1e-2);
    for (std::uint32_t sub : {0b001u, 0b010u, 0b100u, 0b011u, 0b101u, 0b110u}) {
      CHECK(eval.chi_restricted(sub, res.n) <= eval.chi(res.n) + 1e-15);
    }
  }
}

TEST_CASE("infeasible exponents are reported with the subset") {
  const auto useless = bsc_as_mac(0.5);
  const auto q = InputDistribution::uniform({2});
  const std::vector<MessageClass> classes{{2, 1e-3, 0.0}};
  CHECK_THROWS_AS(
      min_codeword_length_mac(useless, q, classes, Schedule({1}), RhoParam(1.0), 1e-3),
      InfeasibleExponent);
  try {
    min_codeword_length_mac(useless, q, classes, Schedule({1}), RhoParam(1.0), 1e-3);
  } catch (const InfeasibleExponent& e) {
    CHECK(e.subset_mask == 1);
  }
}

TEST_CASE("a generous target is met by a single channel use") {
  // a noiseless 16-ary letter already carries more than one 2-ary message
  const DiscreteMac mac({16}, 16, DiscreteChannel::identity(16).p);
  const auto q = InputDistribution::uniform({16});
  const std::vector<MessageClass> classes{{2, 0.5, 0.0}};
  MacChiEvaluator eval(mac, q, classes, Schedule({1}), RhoParam(1.0));
  REQUIRE(eval.chi(1) <= 0.5);
  const auto res = min_codeword_length_mac(mac, q, classes, Schedule({1}), RhoParam(1.0), 0.5);
  CHECK(res.n == 1);
}

TEST_CASE("broadcast codeword lengths") {
  const auto spec = DegradedBroadcastSpec::binary_cascade(0.02, 0.08, {0.9, 0.1, 0.15, 0.85},
                                                          {0.5, 0.5});
  const std::vector<MessageClass> classes{{2, 1e-2, 0.0}, {2, 1e-2, 0.0}};
  const RhoParam rho(1.0);

  SUBCASE("per-receiver lengths match a scan and the overall is their max") {
    const Schedule s({2, 1});
    DbcChiEvaluator eval(spec, classes, s, rho);
    const auto res = min_codeword_length_dbc(spec, classes, s, rho);
    for (std::size_t j = 0; j < 2; ++j) {
      const std::int64_t scan = linear_scan(
          [&](std::int64_t n) { return eval.chi(j, n); }, classes[j].target_error);
      CHECK(res.per_receiver[j] == scan);
      CHECK(res.detail[j].chi_at_n <= classes[j].target_error);
      CHECK(res.detail[j].chi_before > classes[j].target_error);
    }
    CHECK(res.overall == std::max(res.per_receiver[0], res.per_receiver[1]));
  }

  SUBCASE("single receiver reduces to the single-class multiaccess search") {
    DegradedBroadcastSpec one;
    one.input_sizes = {2};
    one.output_sizes = {2};
    one.first_hop = DiscreteChannel::binary_symmetric(0.1);
    one.top_marginal = {0.5, 0.5};
    const std::vector<MessageClass> cls{{2, 1e-3, 0.0}};
    const auto res = min_codeword_length_dbc(one, cls, Schedule({1}), RhoParam(1.0));
    CHECK(res.overall == 35);
  }

  SUBCASE("sub-schedules never lengthen the codeword") {
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> cnt(0, 3);
    int done = 0;
    while (done < 12) {
      const auto rspec = testutil::random_dbc(2, rng);
      Schedule s({cnt(rng), cnt(rng)});
      if (s.is_empty()) continue;
      Schedule sub = s;
      for (auto& c : sub.counts) {
        if (c > 0) --c;
      }
      if (sub.is_empty()) continue;
      DbcChiEvaluator eval(rspec, classes, s, rho);
      bool feasible = true;
      for (std::size_t j = 0; j < 2; ++j) {
        if (s.counts[j] == 0) continue;
        try {
          eval.require_feasible(j);
        } catch (const InfeasibleExponent&) {
          feasible = false;
        }
      }
      if (!feasible) continue;
      const auto full = min_codeword_length_dbc(rspec, classes, s, rho);
      const auto part = min_codeword_length_dbc(rspec, classes, sub, rho);
      for (std::size_t j = 0; j < 2; ++j) {
        if (sub.counts[j] > 0 && s.counts[j] > 0) {
          CHECK(part.per_receiver[j] <= full.per_receiver[j]);
        }
      }
      ++done;
    }
  }

  SUBCASE("null-message padding lengthens the codeword") {
    const Schedule s({1, 1});
    const auto plain = min_codeword_length_dbc(spec, classes, s, rho, false);
    const auto padded = min_codeword_length_dbc(spec, classes, s, rho, true);
    CHECK(padded.overall >= plain.overall);
  }
}
