#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "schedcomm/cli.hpp"
#include "schedcomm/json_io.hpp"
#include "schedcomm/scenario.hpp"

using namespace schedcomm;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "schedcomm_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  return path;
}

int invoke(const std::vector<std::string>& args, std::string* out_text = nullptr,
           std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

// one-source noisy channel, joint decoding, M = 2, p_e = 1e-3
std::string single_class_scenario() {
  Json j;
  j["mode"] = "joint";
  j["channel"] = Json{{"kind", "discrete_mac"},
                      {"input_alphabets", {2}},
                      {"output_alphabet", 2},
                      {"transition", {0.9, 0.1, 0.1, 0.9}}};
  j["q"] = {{0.5, 0.5}};
  j["classes"] = Json::array({Json{{"M", 2}, {"p_e", 1e-3}}});
  j["rho"] = 1.0;
  j["K"] = 1;
  j["policy"] = Json{{"kind", "subclass_state_independent"},
                     {"p", Json::array({Json{{"s", {1}}, {"w", 1.0}}})}};
  j["arrivals"] = Json{{"kind", "poisson"}, {"rates", {0.01}}};
  j["horizon"] = 25000;
  j["replications"] = 2;
  j["seed"] = 5;
  return j.dump();
}

std::string gaussian_scenario(double rate) {
  Json j;
  j["mode"] = "independent";
  j["channel"] = Json{{"kind", "gaussian_mac"}, {"snr", {10.0}}};
  j["classes"] = Json::array({Json{{"M", 2}, {"p_e", 1e-3}, {"snr", 10.0}}});
  j["rho"] = 1.0;
  j["K"] = 4;
  Json p = Json::array({Json{{"s", {4}}, {"w", 1.0}}});
  j["policy"] = Json{{"kind", "non_idling"}, {"p", p}, {"tie_break", "renormalize"}};
  j["arrivals"] = Json{{"kind", "poisson"}, {"rates", {rate}}};
  j["horizon"] = 30000;
  j["replications"] = 2;
  j["seed"] = 9;
  return j.dump();
}

}  // namespace

TEST_CASE("codelen subcommand reports the worked single-class answer") {
  const auto path = write_temp("single.json", single_class_scenario());
  std::string out;
  REQUIRE(invoke({"codelen", "--scenario", path.string()}, &out) == cli::kExitOk);
  const Json j = Json::parse(out);
  REQUIRE(j.at("codelen").size() == 1);
  CHECK(j["codelen"][0]["N"].get<int>() == 35);
  CHECK(j["codelen"][0]["chi_N"].get<double>() <= 1e-3);
  CHECK(j["codelen"][0]["chi_N_minus_1"].get<double>() > 1e-3);
}

TEST_CASE("simulate with no arrivals is stable") {
  Json j = Json::parse(gaussian_scenario(0.0));
  const auto path = write_temp("lambda0.json", j.dump());
  std::string out;
  REQUIRE(invoke({"simulate", "--scenario", path.string()}, &out) == cli::kExitOk);
  const Json rep = Json::parse(out);
  CHECK(rep["stable_count"].get<std::size_t>() == 2);
  CHECK(rep["unstable_count"].get<std::size_t>() == 0);
}

TEST_CASE("region with zero rates is inside with zero mass") {
  const auto path = write_temp("region0.json", gaussian_scenario(0.0));
  std::string out;
  REQUIRE(invoke({"region", "--scenario", path.string(), "--ea", "0"}, &out) == cli::kExitOk);
  const Json j = Json::parse(out);
  CHECK(j["verdict"].get<std::string>() == "inside");
  CHECK(j["outer"]["mass"].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("region flags rates beyond every schedule") {
  const auto path = write_temp("region_big.json", gaussian_scenario(0.0));
  std::string out;
  REQUIRE(invoke({"region", "--scenario", path.string(), "--ea", "50"}, &out) == cli::kExitOk);
  const Json j = Json::parse(out);
  CHECK(j["verdict"].get<std::string>() == "outside");
  CHECK(j["transience"]["holds"].get<bool>());
}

TEST_CASE("exponent subcommand emits the quanta table") {
  const auto path = write_temp("expo.json", gaussian_scenario(0.05));
  std::string out;
  REQUIRE(invoke({"exponent", "--scenario", path.string()}, &out) == cli::kExitOk);
  const Json j = Json::parse(out);
  CHECK(j["quanta"].size() == 5);  // schedules 0..4 of one class
}

TEST_CASE("simulate output is byte-identical across runs and csv follows the schema") {
  const auto path = write_temp("sim_det.json", gaussian_scenario(0.05));
  const auto csv_path =
      std::filesystem::temp_directory_path() / "schedcomm_tests" / "series.csv";
  std::string a, b;
  REQUIRE(invoke({"simulate", "--scenario", path.string(), "--csv", csv_path.string()}, &a) ==
          cli::kExitOk);
  REQUIRE(invoke({"simulate", "--scenario", path.string()}, &b) == cli::kExitOk);
  CHECK(a == b);
  std::ifstream csv(csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "slot,total_messages,total_work");
  std::string first;
  std::getline(csv, first);
  CHECK(first.rfind("0,", 0) == 0);
}

TEST_CASE("seed flag changes stochastic output") {
  const auto path = write_temp("sim_seed.json", gaussian_scenario(0.05));
  std::string a, b;
  REQUIRE(invoke({"simulate", "--scenario", path.string(), "--seed", "1"}, &a) == cli::kExitOk);
  REQUIRE(invoke({"simulate", "--scenario", path.string(), "--seed", "2"}, &b) == cli::kExitOk);
  CHECK(a != b);
}

TEST_CASE("sweep emits one ordered row per axis point") {
  const auto path = write_temp("sweep.json", gaussian_scenario(0.01));
  std::string out;
  REQUIRE(invoke({"sweep", "--scenario", path.string(), "--axis", "K", "--from", "1", "--to",
                  "8", "--points", "8"},
                 &out) == cli::kExitOk);
  std::istringstream lines(out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "axis,inner_threshold,outer_threshold");
  double prev_axis = 0.0;
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const double axis = std::stod(line.substr(0, line.find(',')));
    CHECK(axis > prev_axis);
    prev_axis = axis;
    ++rows;
  }
  CHECK(rows == 8);
}

TEST_CASE("sweep can bracket each point with simulations") {
  Json j = Json::parse(gaussian_scenario(0.01));
  j["replications"] = 2;
  j["horizon"] = 30000;
  const auto path = write_temp("sweep_sim.json", j.dump());
  std::string out;
  REQUIRE(invoke({"sweep", "--scenario", path.string(), "--axis", "K", "--from", "2", "--to",
                  "4", "--points", "3", "--simulate"},
                 &out) == cli::kExitOk);
  std::istringstream lines(out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "axis,inner_threshold,outer_threshold,verdict_low,verdict_high");
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    // the 0.9x point must never read unstable, the 1.1x never stable
    CHECK(line.find(",unstable,") == std::string::npos);
    const auto last = line.rfind(',');
    CHECK(line.substr(last + 1) != "stable");
  }
  CHECK(rows == 3);
}

TEST_CASE("sweep along the alphabet axis") {
  // longer messages lower the message-rate threshold but raise the nat rate
  const auto path = write_temp("sweep_m.json", gaussian_scenario(0.01));
  std::string out;
  REQUIRE(invoke({"sweep", "--scenario", path.string(), "--axis", "M", "--from", "4", "--to",
                  "65536", "--points", "4"},
                 &out) == cli::kExitOk);
  std::istringstream lines(out);
  std::string header, line;
  std::getline(lines, header);
  double prev_msgs = std::numeric_limits<double>::infinity();
  double prev_nats = 0.0;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double m = std::stod(line.substr(0, c1));
    const double inner = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(inner < prev_msgs);
    const double nats = inner * std::log(m);
    CHECK(nats > prev_nats);
    prev_msgs = inner;
    prev_nats = nats;
    ++rows;
  }
  CHECK(rows >= 3);
}

TEST_CASE("config errors exit with code 2") {
  std::string err;
  CHECK(invoke({"simulate", "--scenario", "/nonexistent/file.json"}, nullptr, &err) ==
        cli::kExitConfig);
  const auto bad = write_temp("bad.json", "{\"mode\": \"nope\"}");
  CHECK(invoke({"simulate", "--scenario", bad.string()}, nullptr, &err) == cli::kExitConfig);
  CHECK(invoke({"codelen", "--scenario", write_temp("g.json", gaussian_scenario(0.0)).string()},
               nullptr, &err) == cli::kExitConfig);
}

TEST_CASE("infeasible exponents exit with code 3") {
  Json j = Json::parse(single_class_scenario());
  j["channel"]["transition"] = {0.5, 0.5, 0.5, 0.5};  // useless channel
  const auto path = write_temp("useless.json", j.dump());
  std::string err;
  CHECK(invoke({"codelen", "--scenario", path.string()}, nullptr, &err) ==
        cli::kExitInfeasible);
  CHECK(err.find("subset") != std::string::npos);
}

TEST_CASE("scenario json round-trips") {
  const Json j = Json::parse(single_class_scenario());
  const Scenario sc = scenario_from_json(j);
  const Scenario back = scenario_from_json(to_json(sc));
  CHECK(back.mode == sc.mode);
  CHECK(back.K == sc.K);
  CHECK(back.classes.size() == sc.classes.size());
  CHECK(to_json(back).dump() == to_json(sc).dump());
}
