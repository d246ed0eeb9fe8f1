#include "schedcomm/cli.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "schedcomm/scenario.hpp"

namespace schedcomm::cli {

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<std::size_t> replications;
  std::string out_path;
};

Scenario load_scenario(const CommonOpts& opts) {
  std::ifstream in(opts.scenario_path);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + opts.scenario_path);
  Json j = Json::parse(in);
  Scenario sc = scenario_from_json(j);
  if (opts.seed) sc.seed = *opts.seed;
  if (opts.horizon) sc.horizon = *opts.horizon;
  if (opts.replications) sc.replications = *opts.replications;
  return sc;
}

void emit(const std::string& text, const CommonOpts& opts, std::ostream& out) {
  if (opts.out_path.empty()) {
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
  } else {
    std::ofstream f(opts.out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + opts.out_path);
    f << text;
  }
}

Json schedule_json(const Schedule& s) { return Json(s.counts); }

int cmd_exponent(const CommonOpts& opts, std::ostream& out) {
  const Scenario sc = load_scenario(opts);
  const RhoParam rho(sc.rho);
  Json result;
  result["rho"] = sc.rho;
  if (sc.mode == Mode::Independent) {
    const CompiledScenario comp = compile_scenario(sc);
    Json rows = Json::array();
    for (std::size_t i = 0; i < comp.quanta.schedules.size(); ++i) {
      rows.push_back(Json{{"s", schedule_json(comp.quanta.schedules[i])},
                          {"phi", comp.quanta.phi[i]}});
    }
    result["quanta"] = rows;
  } else if (sc.mode == Mode::Joint) {
    const auto& mac = std::get<DiscreteMac>(sc.channel);
    Json rows = Json::array();
    for (const auto& ws : sc.policy.p) {
      if (ws.s.is_empty()) continue;
      MacChiEvaluator eval(mac, *sc.input_dist, sc.classes, ws.s, rho);
      Json subsets = Json::array();
      const std::uint32_t active = eval.active_mask();
      for (std::uint32_t mask = active;; mask = (mask - 1) & active) {
        if (mask != 0) {
          subsets.push_back(Json{{"subset", mask},
                                 {"e0", eval.subset_exponent(mask)},
                                 {"rate_nats", eval.subset_rate_nats(mask)}});
        }
        if (mask == 0) break;
      }
      rows.push_back(Json{{"s", schedule_json(ws.s)}, {"subsets", subsets}});
    }
    result["exponents"] = rows;
  } else {
    const auto& spec = std::get<DegradedBroadcastSpec>(sc.channel);
    const std::size_t J = spec.num_receivers();
    Json rows = Json::array();
    for (std::size_t j = 0; j < J; ++j) {
      Json per_source = Json::array();
      for (std::size_t k = j; k < J; ++k) {
        per_source.push_back(Json{{"source", k}, {"e0", e0_dbc(spec, k, j, rho)}});
      }
      rows.push_back(Json{{"receiver", j}, {"sources", per_source}});
    }
    result["exponents"] = rows;
  }
  emit(result.dump(), opts, out);
  return kExitOk;
}

int cmd_codelen(const CommonOpts& opts, std::ostream& out) {
  const Scenario sc = load_scenario(opts);
  if (sc.mode == Mode::Independent) {
    throw std::invalid_argument("codelen applies to joint or dbc scenarios");
  }
  const RhoParam rho(sc.rho);
  Json rows = Json::array();
  for (const auto& ws : sc.policy.p) {
    if (ws.s.is_empty()) continue;
    if (sc.mode == Mode::Joint) {
      const auto& mac = std::get<DiscreteMac>(sc.channel);
      double p_e = 1.0;
      for (std::size_t j = 0; j < sc.classes.size(); ++j) {
        if (ws.s.counts[j] > 0) p_e = std::min(p_e, sc.classes[j].target_error);
      }
      const CodewordLengthResult res =
          min_codeword_length_mac(mac, *sc.input_dist, sc.classes, ws.s, rho, p_e);
      rows.push_back(Json{{"s", schedule_json(ws.s)},
                          {"N", res.n},
                          {"bracket", {res.bracket_lo, res.bracket_hi}},
                          {"chi_N", res.chi_at_n},
                          {"chi_N_minus_1", res.chi_before},
                          {"bracket_anomaly", res.bracket_anomaly}});
    } else {
      const auto& spec = std::get<DegradedBroadcastSpec>(sc.channel);
      const DbcCodewordLengths res = min_codeword_length_dbc(spec, sc.classes, ws.s, rho);
      Json receivers = Json::array();
      for (std::size_t j = 0; j < res.per_receiver.size(); ++j) {
        if (res.per_receiver[j] == 0) continue;
        receivers.push_back(Json{{"receiver", j},
                                 {"N", res.detail[j].n},
                                 {"bracket", {res.detail[j].bracket_lo, res.detail[j].bracket_hi}},
                                 {"chi_N", res.detail[j].chi_at_n},
                                 {"chi_N_minus_1", res.detail[j].chi_before}});
      }
      rows.push_back(
          Json{{"s", schedule_json(ws.s)}, {"N", res.overall}, {"receivers", receivers}});
    }
  }
  emit(Json{{"codelen", rows}}.dump(), opts, out);
  return kExitOk;
}

// Rate generators over the whole schedule space for the scenario's mode.
std::vector<std::vector<double>> scenario_generators(const Scenario& sc,
                                                     const CompiledScenario& comp) {
  const std::size_t J = sc.num_classes();
  const RhoParam rho(sc.rho);
  std::vector<std::vector<double>> gens;
  if (sc.mode == Mode::Independent) {
    for (std::size_t i = 0; i < comp.quanta.schedules.size(); ++i) {
      const Schedule& s = comp.quanta.schedules[i];
      std::vector<double> r(J, 0.0);
      bool ok = true;
      for (std::size_t j = 0; j < J; ++j) {
        if (s.counts[j] > 0) {
          if (std::isnan(comp.quanta.phi[i][j])) ok = false;
          r[j] = s.counts[j] * comp.quanta.phi[i][j] / comp.service_req[j];
        }
      }
      if (ok) gens.push_back(std::move(r));
    }
    return gens;
  }
  const std::vector<Schedule> all = enumerate_schedules(J, sc.K);
  for (const Schedule& s : all) {
    if (s.is_empty()) {
      gens.emplace_back(J, 0.0);
      continue;
    }
    std::int64_t n = 0;
    if (sc.mode == Mode::Joint) {
      const auto& mac = std::get<DiscreteMac>(sc.channel);
      double p_e = 1.0;
      for (std::size_t j = 0; j < J; ++j) {
        if (s.counts[j] > 0) p_e = std::min(p_e, sc.classes[j].target_error);
      }
      n = min_codeword_length_mac(mac, *sc.input_dist, sc.classes, s, rho, p_e).n;
    } else {
      const auto& spec = std::get<DegradedBroadcastSpec>(sc.channel);
      n = min_codeword_length_dbc(spec, sc.classes, s, rho).overall;
    }
    std::vector<double> r(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      if (s.counts[j] > 0) r[j] = s.counts[j] / static_cast<double>(n);
    }
    gens.push_back(std::move(r));
  }
  return gens;
}

int cmd_region(const CommonOpts& opts, const std::string& ea_csv, std::ostream& out) {
  const Scenario sc = load_scenario(opts);
  const CompiledScenario comp = compile_scenario(sc);
  std::vector<double> ea = sc.arrivals.rates;
  if (!ea_csv.empty()) {
    ea.clear();
    std::stringstream ss(ea_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) ea.push_back(std::stod(tok));
    if (ea.size() != sc.num_classes()) {
      throw std::invalid_argument("--ea needs one rate per class");
    }
  }
  Json result;
  result["ea"] = ea;
  if (sc.mode == Mode::Independent) {
    const NonIdlingBounds bounds = nonidling_inner_bounds(comp.service_req, comp.quanta, sc.K);
    result["inner"] = Json{
        {"per_symbol", {{"coeff", bounds.per_symbol.coeff}, {"rhs", bounds.per_symbol.rhs}}},
        {"workload", {{"coeff", bounds.workload.coeff}, {"rhs", bounds.workload.rhs}}},
        {"holds", bounds.per_symbol.satisfied(ea) || bounds.workload.satisfied(ea)}};
    const std::uint32_t full = (1u << sc.num_classes()) - 1;
    const LinearBound trans = nonidling_transience_bound(comp.service_req, comp.quanta, sc.K, full);
    result["transience"] = Json{{"coeff", trans.coeff},
                                {"rhs", trans.rhs},
                                {"holds", trans.evaluate(ea) >= trans.rhs}};
    if (sc.policy.kind == PolicyKind::StateIndependent) {
      result["state_independent_thresholds"] =
          state_independent_thresholds(comp.service_req, comp.quanta, sc.policy);
    }
  } else {
    const JointRegion region = joint_region(sc.policy.p, comp.codeword_length, sc.num_classes());
    result["class_thresholds"] = region.class_threshold;
  }
  const auto gens = scenario_generators(sc, comp);
  const MembershipResult mem = outer_membership(ea, gens);
  result["outer"] = Json{{"inside", mem.inside}, {"mass", mem.mass}};
  if (mem.inside) {
    result["outer"]["weights"] = mem.weights;
  } else {
    result["outer"]["certificate"] = mem.certificate;
  }
  result["verdict"] = mem.inside ? "inside" : "outside";
  emit(result.dump(), opts, out);
  return kExitOk;
}

int cmd_simulate(const CommonOpts& opts, const std::string& csv_path, std::ostream& out) {
  const Scenario sc = load_scenario(opts);
  CompiledScenario comp = compile_scenario(sc);
  const std::vector<SimReport> reports = run(comp.sim);
  Json reps = Json::array();
  std::size_t stable = 0, unstable = 0;
  for (const auto& r : reports) {
    reps.push_back(to_json(r));
    if (r.verdict.label == StabilityVerdict::Label::Stable) ++stable;
    if (r.verdict.label == StabilityVerdict::Label::Unstable) ++unstable;
  }
  Json result{{"replications", reps},
              {"stable_count", stable},
              {"unstable_count", unstable},
              {"inconclusive_count", reports.size() - stable - unstable}};
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open csv file: " + csv_path);
    f << series_to_csv(reports.front());
  }
  emit(result.dump(), opts, out);
  return kExitOk;
}

struct SweepRow {
  double axis = 0.0;
  double inner = 0.0;
  double outer = 0.0;
  std::string low_verdict;  // sim at 0.9 x inner
  std::string high_verdict; // sim at 1.1 x inner
};

SweepRow sweep_point(const Scenario& base, const std::string& axis, double value,
                     bool simulate) {
  Scenario sc = base;
  if (axis == "K") {
    sc.K = static_cast<int>(value);
    if (sc.policy.kind == PolicyKind::NonIdling) {
      // refresh the base distribution to the new full-schedule set
      const auto all = enumerate_schedules(sc.num_classes(), sc.K);
      sc.policy.p.clear();
      std::size_t full = 0;
      for (const auto& s : all) {
        if (s.total() == sc.K) ++full;
      }
      for (const auto& s : all) {
        if (s.total() == sc.K) sc.policy.p.push_back({s, 1.0 / static_cast<double>(full)});
      }
    }
  } else if (axis == "rho") {
    sc.rho = value;
  } else if (axis == "snr") {
    auto& g = std::get<GaussianMacSpec>(sc.channel);
    for (double& s : g.snr) s = value;
    for (auto& c : sc.classes) c.snr = value;
  } else if (axis == "M") {
    for (auto& c : sc.classes) c.alphabet_size = static_cast<std::uint64_t>(value);
  } else {
    throw std::invalid_argument("unknown sweep axis: " + axis);
  }
  const CompiledScenario comp = compile_scenario(sc);
  const NonIdlingBounds bounds = nonidling_inner_bounds(comp.service_req, comp.quanta, sc.K);
  std::vector<double> dir = sc.arrivals.rates;
  double total = 0.0;
  for (double d : dir) total += d;
  if (total <= 0.0) dir.assign(sc.num_classes(), 1.0);
  // thresholds are reported as total arrival rates along the normalized mix
  total = 0.0;
  for (double d : dir) total += d;
  for (double& d : dir) d /= total;
  const double inner = bounds.inner_scale(dir);
  const std::uint32_t full_mask = (1u << sc.num_classes()) - 1;
  const LinearBound trans =
      nonidling_transience_bound(comp.service_req, comp.quanta, sc.K, full_mask);
  SweepRow row;
  row.axis = value;
  row.inner = inner;
  row.outer = trans.threshold_scale(dir);
  if (simulate) {
    for (double factor : {0.9, 1.1}) {
      Scenario ssim = sc;
      for (std::size_t j = 0; j < dir.size(); ++j) {
        ssim.arrivals.rates[j] = factor * inner * dir[j];
      }
      CompiledScenario csim = compile_scenario(ssim);
      const std::vector<SimReport> reports = run(csim.sim);
      std::size_t stable = 0, unstable = 0;
      for (const auto& r : reports) {
        if (r.verdict.label == StabilityVerdict::Label::Stable) ++stable;
        if (r.verdict.label == StabilityVerdict::Label::Unstable) ++unstable;
      }
      std::string verdict = stable * 2 > reports.size()
                                ? "stable"
                                : (unstable * 2 > reports.size() ? "unstable" : "inconclusive");
      if (factor < 1.0) {
        row.low_verdict = verdict;
      } else {
        row.high_verdict = verdict;
      }
    }
  }
  return row;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis, double from, double to,
              int points, bool simulate, std::ostream& out) {
  const Scenario base = load_scenario(opts);
  if (base.mode != Mode::Independent) {
    throw std::invalid_argument("sweep supports independent-mode scenarios");
  }
  if (points < 1) throw std::invalid_argument("sweep needs at least one point");
  std::vector<double> values;
  if (axis == "K" || axis == "M") {
    for (double v = from; v <= to + 1e-9; v += std::max(1.0, (to - from) / std::max(1, points - 1))) {
      values.push_back(std::floor(v + 0.5));
    }
  } else {
    for (int i = 0; i < points; ++i) {
      values.push_back(points == 1 ? from : from + (to - from) * i / (points - 1));
    }
  }
  std::vector<SweepRow> rows(values.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t next = 0;
  while (next < values.size()) {
    const std::size_t batch = std::min<std::size_t>(hw, values.size() - next);
    std::vector<std::future<SweepRow>> futs;
    for (std::size_t i = 0; i < batch; ++i) {
      futs.push_back(std::async(std::launch::async, sweep_point, std::cref(base),
                                std::cref(axis), values[next + i], simulate));
    }
    for (std::size_t i = 0; i < batch; ++i) rows[next + i] = futs[i].get();
    next += batch;
  }
  std::string csv = simulate ? "axis,inner_threshold,outer_threshold,verdict_low,verdict_high\n"
                             : "axis,inner_threshold,outer_threshold\n";
  for (const auto& r : rows) {
    csv += format_double(r.axis);
    csv += ',';
    csv += format_double(r.inner);
    csv += ',';
    csv += format_double(r.outer);
    if (simulate) {
      csv += ',';
      csv += r.low_verdict;
      csv += ',';
      csv += r.high_verdict;
    }
    csv += '\n';
  }
  emit(csv, opts, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"error exponents, codeword lengths, stability regions and queue simulation "
               "for scheduled multiuser message communication"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string ea_csv;
  std::string csv_path;
  std::string axis = "K";
  double from = 1.0, to = 16.0;
  int points = 16;
  bool simulate = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", opts.scenario_path, "scenario JSON file")->required();
    cmd->add_option("--seed", opts.seed, "override the scenario seed");
    cmd->add_option("--horizon", opts.horizon, "override the horizon");
    cmd->add_option("--replications", opts.replications, "override the replication count");
    cmd->add_option("--out", opts.out_path, "write output to a file instead of stdout");
  };

  auto* c_exp = app.add_subcommand("exponent", "per-schedule service quanta / error exponents");
  add_common(c_exp);
  auto* c_len = app.add_subcommand("codelen", "minimal codeword lengths with brackets");
  add_common(c_len);
  auto* c_reg = app.add_subcommand("region", "stability thresholds and membership");
  add_common(c_reg);
  c_reg->add_option("--ea", ea_csv, "arrival rate vector, comma separated");
  auto* c_sim = app.add_subcommand("simulate", "run the queue and classify stability");
  add_common(c_sim);
  c_sim->add_option("--csv", csv_path, "write the first replication's series as CSV");
  auto* c_swp = app.add_subcommand("sweep", "threshold sweep along an axis");
  add_common(c_swp);
  c_swp->add_option("--axis", axis, "K | rho | snr | M");
  c_swp->add_option("--from", from, "axis start");
  c_swp->add_option("--to", to, "axis end");
  c_swp->add_option("--points", points, "number of axis points");
  c_swp->add_flag("--simulate", simulate, "simulate at 0.9x and 1.1x the inner threshold");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "argument error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (c_exp->parsed()) return cmd_exponent(opts, out);
    if (c_len->parsed()) return cmd_codelen(opts, out);
    if (c_reg->parsed()) return cmd_region(opts, ea_csv, out);
    if (c_sim->parsed()) return cmd_simulate(opts, csv_path, out);
    if (c_swp->parsed()) return cmd_sweep(opts, axis, from, to, points, simulate, out);
  } catch (const InfeasibleExponent& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const BoundaryRefusal& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace schedcomm::cli
