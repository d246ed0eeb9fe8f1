#ifndef SCHEDCOMM_SCENARIO_HPP
#define SCHEDCOMM_SCENARIO_HPP

#include <optional>
#include <string>

#include "schedcomm/json_io.hpp"
#include "schedcomm/qsim.hpp"
#include "schedcomm/regions.hpp"

namespace schedcomm {

/// Everything one experiment needs: channel physics, message classes, the
/// scheduling policy, the arrival processes and the run controls.
struct Scenario {
  Mode mode = Mode::Independent;
  ChannelSpec channel;
  std::optional<InputDistribution> input_dist;  // discrete channels only
  std::vector<MessageClass> classes;
  double rho = 1.0;
  int K = 1;
  PolicySpec policy;
  ArrivalModel arrivals;
  std::int64_t horizon = 200000;
  std::size_t replications = 8;
  std::uint64_t seed = 1;

  std::size_t num_classes() const { return classes.size(); }
  void validate() const;
};

Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& sc);

/// Mode-specific pieces derived from a scenario.
struct CompiledScenario {
  SimConfig sim;
  // independent mode
  std::vector<double> service_req;
  QuantaTable quanta;
  // joint/dbc mode
  std::vector<std::int64_t> codeword_length;  // aligned with policy support
  std::vector<CodewordLengthResult> length_detail;
};

/// Resolves quanta tables / codeword lengths / default splits and builds the
/// runnable SimConfig.
CompiledScenario compile_scenario(const Scenario& sc);

}  // namespace schedcomm

#endif
