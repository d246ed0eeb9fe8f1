#include "schedcomm/scenario.hpp"

#include <cmath>

namespace schedcomm {

namespace {

Mode mode_from_string(const std::string& s) {
  if (s == "independent") return Mode::Independent;
  if (s == "joint") return Mode::Joint;
  if (s == "dbc") return Mode::Dbc;
  throw std::invalid_argument("unknown mode: " + s);
}

const char* mode_to_string(Mode m) {
  switch (m) {
    case Mode::Independent:
      return "independent";
    case Mode::Joint:
      return "joint";
    case Mode::Dbc:
      return "dbc";
  }
  return "?";
}

BatchKind batch_from_string(const std::string& s) {
  if (s == "poisson") return BatchKind::Poisson;
  if (s == "bernoulli") return BatchKind::Bernoulli;
  if (s == "cycle") return BatchKind::DeterministicCycle;
  throw std::invalid_argument("unknown arrival kind: " + s);
}

const char* batch_to_string(BatchKind k) {
  switch (k) {
    case BatchKind::Poisson:
      return "poisson";
    case BatchKind::Bernoulli:
      return "bernoulli";
    case BatchKind::DeterministicCycle:
      return "cycle";
  }
  return "?";
}

}  // namespace

void Scenario::validate() const {
  if (classes.empty()) throw std::invalid_argument("scenario: no classes");
  for (const auto& c : classes) c.validate();
  if (!(rho > 0.0) || rho > 1.0) throw std::invalid_argument("scenario: rho outside (0,1]");
  if (K < 1) throw std::invalid_argument("scenario: K < 1");
  if (arrivals.rates.size() != classes.size()) {
    throw std::invalid_argument("scenario: arrival rates must match classes");
  }
  const std::size_t J = classes.size();
  switch (mode) {
    case Mode::Independent: {
      if (policy.kind == PolicyKind::SubclassStateIndependent) {
        throw std::invalid_argument("scenario: independent mode needs a non-idling or "
                                    "state-independent policy");
      }
      if (std::holds_alternative<DegradedBroadcastSpec>(channel)) {
        throw std::invalid_argument("scenario: independent mode needs a multiaccess channel");
      }
      if (std::holds_alternative<GaussianMacSpec>(channel)) {
        if (std::get<GaussianMacSpec>(channel).num_classes() != J) {
          throw std::invalid_argument("scenario: channel class count mismatch");
        }
      } else if (std::get<DiscreteMac>(channel).num_sources() != J) {
        throw std::invalid_argument("scenario: channel class count mismatch");
      }
      break;
    }
    case Mode::Joint: {
      if (!std::holds_alternative<DiscreteMac>(channel)) {
        throw std::invalid_argument("scenario: joint mode needs a discrete multiaccess channel");
      }
      if (std::get<DiscreteMac>(channel).num_sources() != J) {
        throw std::invalid_argument("scenario: channel class count mismatch");
      }
      if (policy.kind != PolicyKind::SubclassStateIndependent) {
        throw std::invalid_argument("scenario: joint mode needs a subclass policy");
      }
      break;
    }
    case Mode::Dbc: {
      if (!std::holds_alternative<DegradedBroadcastSpec>(channel)) {
        throw std::invalid_argument("scenario: dbc mode needs a broadcast channel");
      }
      if (std::get<DegradedBroadcastSpec>(channel).num_receivers() != J) {
        throw std::invalid_argument("scenario: channel class count mismatch");
      }
      if (policy.kind != PolicyKind::SubclassStateIndependent) {
        throw std::invalid_argument("scenario: dbc mode needs a subclass policy");
      }
      break;
    }
  }
  if (std::holds_alternative<DiscreteMac>(channel) && !input_dist) {
    throw std::invalid_argument("scenario: discrete channels need an input distribution");
  }
  policy.validate(J, K);
}

Scenario scenario_from_json(const Json& j) {
  Scenario sc;
  sc.mode = mode_from_string(j.at("mode").get<std::string>());
  sc.channel = channel_from_json(j.at("channel"));
  if (j.contains("q")) {
    sc.input_dist = InputDistribution(j.at("q").get<std::vector<std::vector<double>>>());
  }
  for (const auto& c : j.at("classes")) sc.classes.push_back(message_class_from_json(c));
  sc.rho = j.at("rho").get<double>();
  sc.K = j.at("K").get<int>();
  sc.policy = policy_from_json(j.at("policy"));
  const Json& arr = j.at("arrivals");
  sc.arrivals.kind = batch_from_string(arr.at("kind").get<std::string>());
  sc.arrivals.rates = arr.at("rates").get<std::vector<double>>();
  if (arr.contains("split")) {
    sc.arrivals.split = arr.at("split").get<std::vector<std::vector<double>>>();
  }
  if (j.contains("horizon")) sc.horizon = j.at("horizon").get<std::int64_t>();
  if (j.contains("replications")) sc.replications = j.at("replications").get<std::size_t>();
  if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
  sc.validate();
  return sc;
}

Json to_json(const Scenario& sc) {
  Json classes = Json::array();
  for (const auto& c : sc.classes) classes.push_back(to_json(c));
  Json arr{{"kind", batch_to_string(sc.arrivals.kind)}, {"rates", sc.arrivals.rates}};
  if (!sc.arrivals.split.empty()) arr["split"] = sc.arrivals.split;
  Json out{{"mode", mode_to_string(sc.mode)},
           {"channel", channel_to_json(sc.channel)},
           {"classes", classes},
           {"rho", sc.rho},
           {"K", sc.K},
           {"policy", to_json(sc.policy)},
           {"arrivals", arr},
           {"horizon", sc.horizon},
           {"replications", sc.replications},
           {"seed", sc.seed}};
  if (sc.input_dist) out["q"] = sc.input_dist->q;
  return out;
}

CompiledScenario compile_scenario(const Scenario& sc) {
  sc.validate();
  CompiledScenario out;
  const RhoParam rho(sc.rho);
  out.sim.mode = sc.mode;
  out.sim.num_classes = sc.num_classes();
  out.sim.K = sc.K;
  out.sim.policy = sc.policy;
  out.sim.arrivals = sc.arrivals;
  out.sim.horizon = sc.horizon;
  out.sim.seed = sc.seed;
  out.sim.replications = sc.replications;

  if (sc.mode == Mode::Independent) {
    for (const auto& c : sc.classes) {
      out.service_req.push_back(service_requirement(c, rho));
    }
    if (std::holds_alternative<GaussianMacSpec>(sc.channel)) {
      out.quanta = QuantaTable::gaussian(std::get<GaussianMacSpec>(sc.channel), sc.K, rho);
    } else {
      out.quanta =
          QuantaTable::discrete(std::get<DiscreteMac>(sc.channel), *sc.input_dist, sc.K, rho);
    }
    out.sim.quanta = out.quanta;
    out.sim.service_req = out.service_req;
    return out;
  }

  // joint / dbc: one codeword length per support schedule
  for (const auto& ws : sc.policy.p) {
    if (ws.s.is_empty()) {
      out.codeword_length.push_back(0);
      out.length_detail.emplace_back();
      continue;
    }
    if (sc.mode == Mode::Joint) {
      const auto& mac = std::get<DiscreteMac>(sc.channel);
      // joint decoding shares one target across the scheduled sources; the
      // strictest class target is used
      double p_e = 1.0;
      for (std::size_t j = 0; j < sc.classes.size(); ++j) {
        if (ws.s.counts[j] > 0) p_e = std::min(p_e, sc.classes[j].target_error);
      }
      const CodewordLengthResult res =
          min_codeword_length_mac(mac, *sc.input_dist, sc.classes, ws.s, rho, p_e);
      out.codeword_length.push_back(res.n);
      out.length_detail.push_back(res);
    } else {
      const auto& spec = std::get<DegradedBroadcastSpec>(sc.channel);
      const DbcCodewordLengths res =
          min_codeword_length_dbc(spec, sc.classes, ws.s, rho);
      out.codeword_length.push_back(res.overall);
      CodewordLengthResult agg;
      agg.n = res.overall;
      out.length_detail.push_back(agg);
    }
  }
  out.sim.codeword_length = out.codeword_length;
  if (out.sim.arrivals.split.empty()) {
    out.sim.arrivals.split =
        default_split(sc.policy.p, out.codeword_length, sc.num_classes());
  }
  return out;
}

}  // namespace schedcomm
