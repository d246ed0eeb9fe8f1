#include "schedcomm/json_io.hpp"

#include <charconv>

namespace schedcomm {

namespace {

std::vector<double> doubles(const Json& j) { return j.get<std::vector<double>>(); }

DiscreteChannel kernel_from_json(const Json& j) {
  return DiscreteChannel(j.at("inputs").get<std::size_t>(), j.at("outputs").get<std::size_t>(),
                         doubles(j.at("p")));
}

Json kernel_to_json(const DiscreteChannel& ch) {
  return Json{{"inputs", ch.num_inputs}, {"outputs", ch.num_outputs}, {"p", ch.p}};
}

}  // namespace

Json to_json(const DiscreteMac& ch) {
  return Json{{"kind", "discrete_mac"},
              {"input_alphabets", ch.input_sizes},
              {"output_alphabet", ch.num_outputs},
              {"transition", ch.p}};
}

Json to_json(const DegradedBroadcastSpec& spec) {
  Json degr = Json::array();
  for (const auto& d : spec.degradations) degr.push_back(kernel_to_json(d));
  Json ladder = Json::array();
  for (const auto& l : spec.ladder) ladder.push_back(kernel_to_json(l));
  return Json{{"kind", "dbc"},
              {"input_alphabets", spec.input_sizes},
              {"output_alphabets", spec.output_sizes},
              {"first_hop", kernel_to_json(spec.first_hop)},
              {"degradations", degr},
              {"ladder", ladder},
              {"top_marginal", spec.top_marginal}};
}

Json to_json(const GaussianMacSpec& spec) {
  return Json{{"kind", "gaussian_mac"}, {"snr", spec.snr}};
}

Json channel_to_json(const ChannelSpec& spec) {
  return std::visit([](const auto& s) { return to_json(s); }, spec);
}

ChannelSpec channel_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete_mac") {
    return DiscreteMac(j.at("input_alphabets").get<std::vector<std::size_t>>(),
                       j.at("output_alphabet").get<std::size_t>(),
                       doubles(j.at("transition")));
  }
  if (kind == "dbc") {
    DegradedBroadcastSpec spec;
    spec.input_sizes = j.at("input_alphabets").get<std::vector<std::size_t>>();
    spec.output_sizes = j.at("output_alphabets").get<std::vector<std::size_t>>();
    spec.first_hop = kernel_from_json(j.at("first_hop"));
    for (const auto& d : j.at("degradations")) spec.degradations.push_back(kernel_from_json(d));
    for (const auto& l : j.at("ladder")) spec.ladder.push_back(kernel_from_json(l));
    spec.top_marginal = doubles(j.at("top_marginal"));
    spec.validate();
    return spec;
  }
  if (kind == "gaussian_mac") {
    return GaussianMacSpec(doubles(j.at("snr")));
  }
  throw std::invalid_argument("unknown channel kind: " + kind);
}

Json to_json(const InputDistribution& q) { return Json{{"q", q.q}}; }

InputDistribution input_distribution_from_json(const Json& j) {
  return InputDistribution(j.at("q").get<std::vector<std::vector<double>>>());
}

Json to_json(const PolicySpec& policy) {
  Json p = Json::array();
  for (const auto& ws : policy.p) {
    p.push_back(Json{{"s", ws.s.counts}, {"w", ws.w}});
  }
  const char* kind = policy.kind == PolicyKind::NonIdling ? "non_idling"
                     : policy.kind == PolicyKind::StateIndependent
                         ? "state_independent"
                         : "subclass_state_independent";
  Json out{{"kind", kind}, {"p", p}};
  if (policy.kind == PolicyKind::NonIdling) {
    out["tie_break"] =
        policy.tie_break == TieBreak::MaxWeight ? "maxweight" : "renormalize";
  }
  return out;
}

PolicySpec policy_from_json(const Json& j) {
  PolicySpec policy;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "non_idling") {
    policy.kind = PolicyKind::NonIdling;
  } else if (kind == "state_independent") {
    policy.kind = PolicyKind::StateIndependent;
  } else if (kind == "subclass_state_independent") {
    policy.kind = PolicyKind::SubclassStateIndependent;
  } else {
    throw std::invalid_argument("unknown policy kind: " + kind);
  }
  for (const auto& item : j.at("p")) {
    policy.p.push_back({Schedule(item.at("s").get<std::vector<int>>()),
                        item.at("w").get<double>()});
  }
  if (j.contains("tie_break")) {
    const std::string tb = j.at("tie_break").get<std::string>();
    if (tb == "maxweight") {
      policy.tie_break = TieBreak::MaxWeight;
    } else if (tb == "renormalize") {
      policy.tie_break = TieBreak::Renormalize;
    } else {
      throw std::invalid_argument("unknown tie_break: " + tb);
    }
  }
  return policy;
}

Json to_json(const MessageClass& cls) {
  Json out{{"M", cls.alphabet_size}, {"p_e", cls.target_error}};
  if (cls.snr > 0.0) out["snr"] = cls.snr;
  return out;
}

MessageClass message_class_from_json(const Json& j) {
  MessageClass cls;
  cls.alphabet_size = j.at("M").get<std::uint64_t>();
  cls.target_error = j.at("p_e").get<double>();
  if (j.contains("snr")) cls.snr = j.at("snr").get<double>();
  cls.validate();
  return cls;
}

Json to_json(const StabilityVerdict& verdict) {
  return Json{{"label", to_string(verdict.label)},
              {"slope", verdict.slope},
              {"mean_queue", verdict.mean_queue},
              {"mean_queue_ci", verdict.mean_queue_ci}};
}

Json to_json(const ClassSojournStats& stats) {
  return Json{{"count", stats.count},   {"mean", stats.mean},
              {"p50", stats.p50},       {"p95", stats.p95},
              {"ci", stats.ci_halfwidth}, {"flagged", stats.flagged}};
}

Json to_json(const SimReport& report, bool include_series) {
  Json sojourn = Json::array();
  for (const auto& st : sojourn_stats(report)) sojourn.push_back(to_json(st));
  Json out{{"seed", report.seed},
           {"replication", report.replication},
           {"horizon", report.horizon},
           {"empty_visits", report.empty_visits},
           {"empty_visits_second_half", report.empty_visits_second_half},
           {"mean_arriving_work", report.mean_arriving_work},
           {"verdict", to_json(report.verdict)},
           {"sojourn", sojourn}};
  if (include_series) {
    out["n_series"] = report.n_series;
    out["work_series"] = report.work_series;
    out["sojourns"] = report.sojourns;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string series_to_csv(const SimReport& report) {
  std::string out = "slot,total_messages,total_work\n";
  for (std::size_t t = 0; t < report.n_series.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += std::to_string(report.n_series[t]);
    out += ',';
    out += format_double(report.work_series[t]);
    out += '\n';
  }
  return out;
}

}  // namespace schedcomm
