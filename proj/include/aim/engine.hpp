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

#pragma once

#include "aim/arrivals.hpp"
#include "aim/coordination.hpp"
#include "aim/model.hpp"
#include "aim/ocp.hpp"
#include "aim/safety.hpp"
#include "aim/signalized.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aim
{

enum class Algorithm { DdSwa, Combined, Fifo, Signal };

std::string_view to_string(Algorithm algorithm);
/// Throws ConfigError for unknown names.
Algorithm parse_algorithm(std::string_view name);

struct RunConfig
{
  LaneGeometry geometry{LaneGeometry::standard_four_way()};
  PhysicalParams params;
  ObjectiveWeights weights;
  /// Coordination period.
  double t_coop{3.0};
  /// Coordinated-phase horizon.
  double t_c{30.0};
  /// Objective window per vehicle.
  double t_h{30.0};
  SchedulingWeights scheduling;
  std::map<LaneId, double> lane_rates;
  /// Fixed request times; a lane listed here ignores its rate.
  std::map<LaneId, std::vector<double>> scripted_arrivals;
  Algorithm algorithm{Algorithm::DdSwa};
  /// Fixed duration; ten Webster cycles when unset.
  std::optional<double> duration;
  /// Webster saturation flow per lane (veh/s); v_max / (L + r) when unset.
  std::optional<double> sat_flow;
  double lost_per_phase{4.0};
  double dt{0.1};
  std::uint64_t seed{1};
  SolverSettings settings;
  std::size_t max_batch{8};
  /// Throw SafetyViolation when the post-hoc sweep finds anything.
  bool abort_on_violation{true};
  /// Keep every round's full result in RunResult::traces.
  bool keep_traces{false};

  double saturation_flow() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Uniform rate on every lane of the configuration's geometry.
std::map<LaneId, double> uniform_rates(const LaneGeometry & geometry, double sigma);

/// k T_coop for the smallest k >= 0 with k T_coop >= t_arrival.
double assign_tC(double t_arrival, double t_coop);

/// Fixed-time plan for the configuration's rates (Webster, greedy phases).
SignalPlan signal_plan(const RunConfig & config);

/// config.duration, or ten cycles of the Webster plan.
double run_duration(const RunConfig & config);

struct VehicleRecord
{
  VehicleId id{0};
  LaneId lane{0};
  double t_arrival{0.0};
  double t_coord{0.0};
  std::optional<double> t_entry;
  std::optional<double> t_exit;
  double objective{0.0};
  bool crossed{false};
  std::size_t holds{0};

  std::optional<double> ttc() const;
};

struct RoundRecord
{
  std::size_t index{0};
  double t{0.0};
  /// Signal mode: the lane given green; 0 otherwise.
  LaneId lane{0};
  std::size_t pool{0};
  std::size_t held{0};
  std::size_t orders_enumerated{0};
  CommCounts comm;
  double wall_ms{0.0};
};

struct RunResult
{
  double duration{0.0};
  std::vector<VehicleRecord> vehicles;
  std::vector<RoundRecord> rounds;
  std::map<VehicleId, SampledTrajectory> trajectories;
  std::vector<ScheduleEntry> schedule;
  SafetyReport safety;
  ArrivalLog arrivals;
  std::optional<SignalPlan> signal;
  std::size_t provisional_solves{0};
  std::size_t provisional_fallbacks{0};
  std::size_t provisional_messages{0};
  double provisional_ms{0.0};
  std::vector<RoundResult> traces;

  /// Total round wall time over total pool size, in ms; nullopt without rounds.
  std::optional<double> compute_ms_per_vehicle() const;
};

/// Message counts a round consumed, by category.
CommCounts comm_trace(const RoundResult & round);

/**
 * Simulates the configured stream on the grid k dt. Each step first admits
 * requested arrivals that pass the gate (solving their provisional plans up
 * to t_C), then runs the coordination round or green dispatch due at that
 * step and splices its plans into the executed trajectories.
 */
RunResult run(const RunConfig & config);

/// Rear-end, overlap, envelope and bound sweep over the executed trajectories.
SafetyReport safety_sweep(const RunConfig & config, const RunResult & result);

/// vehicles.csv, rounds.csv, timing.csv, arrivals.csv, safety.json, config.json.
void write_run_outputs(
  const std::filesystem::path & dir, const RunConfig & config, const RunResult & result);

}  // namespace aim
