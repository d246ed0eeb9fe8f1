#ifndef SCHEDCOMM_JSON_IO_HPP
#define SCHEDCOMM_JSON_IO_HPP

#include <string>
#include <variant>

#include <json.hpp>

#include "schedcomm/channel.hpp"
#include "schedcomm/codelen.hpp"
#include "schedcomm/qsim.hpp"
#include "schedcomm/sched.hpp"

namespace schedcomm {

using Json = nlohmann::json;

using ChannelSpec = std::variant<DiscreteMac, DegradedBroadcastSpec, GaussianMacSpec>;

// Channel specs: {"kind": "discrete_mac" | "dbc" | "gaussian_mac", ...}
Json to_json(const DiscreteMac& ch);
Json to_json(const DegradedBroadcastSpec& spec);
Json to_json(const GaussianMacSpec& spec);
Json channel_to_json(const ChannelSpec& spec);
ChannelSpec channel_from_json(const Json& j);

Json to_json(const InputDistribution& q);
InputDistribution input_distribution_from_json(const Json& j);

Json to_json(const PolicySpec& policy);
PolicySpec policy_from_json(const Json& j);

Json to_json(const MessageClass& cls);
MessageClass message_class_from_json(const Json& j);

Json to_json(const SimReport& report, bool include_series = false);
Json to_json(const StabilityVerdict& verdict);
Json to_json(const ClassSojournStats& stats);

/// slot,total_messages,total_work rows with a fixed header, C-locale numbers.
std::string series_to_csv(const SimReport& report);

/// Locale-independent shortest-round-trip formatting used by all CSV output.
std::string format_double(double v);

}  // namespace schedcomm

#endif
