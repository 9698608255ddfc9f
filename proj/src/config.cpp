// Copyright 2026 The AIM Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aim/config.hpp"

#include "aim/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <fstream>
#include <optional>
#include <set>

namespace aim
{

namespace pt = boost::property_tree;

WeightProfile parse_profile(std::string_view name)
{
  if (name == "comparison1") return WeightProfile::Comparison1;
  if (name == "comparison2") return WeightProfile::Comparison2;
  if (name == "comparison3") return WeightProfile::Comparison3;
  if (name == "comparison4") return WeightProfile::Comparison4;
  throw ConfigError(fmt::format("unknown weight profile '{}'", name));
}

namespace
{

const std::map<std::string, std::set<std::string>> kKeys{
  {"run", {"algorithm", "seed", "dt", "duration", "t_coop", "t_c", "t_h", "max_batch"}},
  {"arrivals", {"sigma"}},
  {"vehicle", {"u_min", "u_max", "v_max", "v_min", "robustness", "length"}},
  {"objective", {"w_v", "w_a", "w_j"}},
  {"scheduling", {"profile", "w_x", "w_v", "w_t", "w_n", "w_s", "w_sigma", "w_w", "w_l"}},
  {"signal", {"sat_flow", "lost_per_phase"}},
  {"solver", {"tolerance", "primal_tolerance", "max_iterations"}},
};

template <typename T>
std::optional<T> value(const pt::ptree & section, const char * key)
{
  const auto child = section.get_child_optional(key);
  if (!child) return std::nullopt;
  return child->get_value<T>();
}

template <typename T>
void read(const pt::ptree & section, const char * key, T & out)
{
  if (const auto v = value<T>(section, key)) out = *v;
}

}  // namespace

RunConfig parse_run_config(std::istream & is)
{
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error & e) {
    throw ConfigError(e.what());
  }
  for (const auto & [name, section] : tree) {
    const auto known = kKeys.find(name);
    if (known == kKeys.end()) throw ConfigError(fmt::format("unknown section [{}]", name));
    for (const auto & [key, value] : section) {
      const bool lane_key = name == "arrivals" && key.rfind("lane.", 0) == 0;
      if (!lane_key && known->second.count(key) == 0) {
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, name));
      }
    }
  }

  RunConfig c;
  const pt::ptree empty;
  const auto section = [&](const char * name) -> const pt::ptree & {
    const auto child = tree.get_child_optional(name);
    return child ? *child : empty;
  };
  try {
    const auto & run = section("run");
    if (const auto a = value<std::string>(run, "algorithm")) c.algorithm = parse_algorithm(*a);
    read(run, "seed", c.seed);
    read(run, "dt", c.dt);
    if (const auto d = value<double>(run, "duration")) c.duration = *d;
    read(run, "t_coop", c.t_coop);
    read(run, "t_c", c.t_c);
    read(run, "t_h", c.t_h);
    read(run, "max_batch", c.max_batch);

    const auto & arr = section("arrivals");
    if (const auto s = value<double>(arr, "sigma")) c.lane_rates = uniform_rates(c.geometry, *s);
    for (const auto & [key, value] : arr) {
      if (key.rfind("lane.", 0) != 0) continue;
      c.lane_rates[static_cast<LaneId>(std::stoi(key.substr(5)))] = value.get_value<double>();
    }

    const auto & veh = section("vehicle");
    read(veh, "u_min", c.params.u_min);
    read(veh, "u_max", c.params.u_max);
    read(veh, "v_max", c.params.v_max);
    read(veh, "v_min", c.params.v_min);
    read(veh, "robustness", c.params.robustness);
    read(veh, "length", c.params.vehicle_length);

    const auto & obj = section("objective");
    read(obj, "w_v", c.weights.velocity);
    read(obj, "w_a", c.weights.accel);
    read(obj, "w_j", c.weights.jerk);

    const auto & sch = section("scheduling");
    if (const auto p = value<std::string>(sch, "profile")) {
      const auto profile = parse_profile(*p);
      c.scheduling = scheduling_profile(profile);
      c.weights = objective_profile(profile);
      read(obj, "w_v", c.weights.velocity);
      read(obj, "w_a", c.weights.accel);
      read(obj, "w_j", c.weights.jerk);
    }
    read(sch, "w_x", c.scheduling.w_x);
    read(sch, "w_v", c.scheduling.w_v);
    read(sch, "w_t", c.scheduling.w_t);
    read(sch, "w_n", c.scheduling.w_n);
    read(sch, "w_s", c.scheduling.w_s);
    read(sch, "w_sigma", c.scheduling.w_sigma);
    read(sch, "w_w", c.scheduling.w_w);
    read(sch, "w_l", c.scheduling.w_l);

    const auto & sig = section("signal");
    if (const auto s = value<double>(sig, "sat_flow")) c.sat_flow = *s;
    read(sig, "lost_per_phase", c.lost_per_phase);

    const auto & sol = section("solver");
    read(sol, "tolerance", c.settings.tolerance);
    read(sol, "primal_tolerance", c.settings.primal_tolerance);
    read(sol, "max_iterations", c.settings.max_iterations);
  } catch (const pt::ptree_bad_data & e) {
    throw ConfigError(fmt::format("malformed value: {}", e.what()));
  } catch (const std::invalid_argument &) {
    throw ConfigError("malformed lane id in [arrivals]");
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  return parse_run_config(is);
}

nlohmann::json to_json(const SignalPlan & plan)
{
  nlohmann::json j;
  j["phases"] = plan.phases;
  j["cycle"] = plan.cycle;
  j["green"] = plan.green;
  j["lost"] = plan.lost;
  j["offset"] = plan.offset;
  return j;
}

nlohmann::json to_json(const RunConfig & c)
{
  nlohmann::json j;
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["seed"] = c.seed;
  j["dt"] = c.dt;
  j["duration"] = c.duration ? nlohmann::json(*c.duration) : nlohmann::json();
  j["t_coop"] = c.t_coop;
  j["t_c"] = c.t_c;
  j["t_h"] = c.t_h;
  j["max_batch"] = c.max_batch;
  nlohmann::json rates = nlohmann::json::object();
  for (const auto & [lane, rate] : c.lane_rates) rates[std::to_string(lane)] = rate;
  j["lane_rates"] = rates;
  if (!c.scripted_arrivals.empty()) {
    nlohmann::json script = nlohmann::json::object();
    for (const auto & [lane, times] : c.scripted_arrivals) script[std::to_string(lane)] = times;
    j["scripted_arrivals"] = script;
  }
  j["vehicle"] = {
    {"u_min", c.params.u_min},   {"u_max", c.params.u_max},
    {"v_max", c.params.v_max},   {"v_min", c.params.v_min},
    {"robustness", c.params.robustness}, {"length", c.params.vehicle_length}};
  j["objective"] = {{"w_v", c.weights.velocity}, {"w_a", c.weights.accel}, {"w_j", c.weights.jerk}};
  const auto & s = c.scheduling;
  j["scheduling"] = {{"w_x", s.w_x}, {"w_v", s.w_v}, {"w_t", s.w_t}, {"w_n", s.w_n},
                     {"w_s", s.w_s}, {"w_sigma", s.w_sigma}, {"w_w", s.w_w}, {"w_l", s.w_l}};
  j["signal"] = {{"sat_flow", c.saturation_flow()}, {"lost_per_phase", c.lost_per_phase}};
  j["solver"] = {
    {"tolerance", c.settings.tolerance},
    {"primal_tolerance", c.settings.primal_tolerance},
    {"max_iterations", c.settings.max_iterations},
    {"stop_margin", c.settings.stop_margin},
    {"entry_margin", c.settings.entry_margin}};
  j["approach_length"] = c.geometry.approach_length();
  return j;
}

}  // namespace aim
