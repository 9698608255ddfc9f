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

#include "aim/model.hpp"
#include "aim/ocp.hpp"
#include "aim/schedule.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace aim
{

/// Precedence-index weights of the scheduling features.
struct SchedulingWeights
{
  double w_x{0.1};
  double w_v{5.0};
  double w_t{3.0};
  double w_n{4.5};
  double w_s{6.0};
  double w_sigma{40.0};
  double w_w{0.5};
  double w_l{0.02};

  /// Throws ConfigError on a negative weight.
  void validate() const;
  SchedulingWeights scaled(double factor) const;
};

enum class WeightProfile { Comparison1, Comparison2, Comparison3, Comparison4 };

SchedulingWeights scheduling_profile(WeightProfile profile);
ObjectiveWeights objective_profile(WeightProfile profile);

/// A vehicle in the coordination pool, with its state frozen at t_C.
struct CoordVehicle
{
  VehicleId id{0};
  LaneId lane{0};
  double length{4.3};
  double x{0.0};
  double v{0.0};
  double u_prev{0.0};
  double t_arrival{0.0};
  /// Committed trajectory of the closest vehicle ahead when it is not in the pool.
  std::optional<Leader> external_leader;
};

struct PrecedenceFeatures
{
  double distance{0.0};    // d + x
  double velocity{0.0};
  double waited{0.0};      // t_C - t_A
  double queue{0.0};       // |Q_i|
  double separation{0.0};  // mean over Q_i of x_i - x_j, 0 for an empty queue
  double lane_rate{0.0};
};

struct PrecedenceBreakdown
{
  VehicleId vehicle{0};
  PrecedenceFeatures features;
  double tau{0.0};
  double precedence{0.0};
  double demand{0.0};
};

/// Indices of the lane-leading vehicles (largest x per lane), ordered by lane id.
std::vector<std::size_t> front_set(std::span<const CoordVehicle> pool);

/**
 * max{t_X - t_C} over scheduled entries on lanes incompatible with `lane`,
 * clamped at 0. `reads` (if given) is increased by the number of such entries.
 */
double min_wait_time(
  LaneId lane, const ScheduledSet & scheduled, double t_coord, const LaneGeometry & geometry,
  std::size_t * reads = nullptr);

/// Features of pool[index]; Q_i is the set of pool vehicles behind it on its lane.
PrecedenceFeatures precedence_features(
  std::span<const CoordVehicle> pool, std::size_t index, double approach_length, double t_coord,
  double lane_rate);

PrecedenceBreakdown precedence(
  VehicleId vehicle, const PrecedenceFeatures & f, double tau, const SchedulingWeights & w);

/// w_l * mean(demands) * W_v; throws ContractViolation on an empty set.
double weighted_velocity_coeff(std::span<const double> demands, double w_l, double w_velocity);

/// Drops entries that exited strictly before t_now.
ScheduledSet prune_scheduled(const ScheduledSet & scheduled, double t_now);

struct RoundContext
{
  const LaneGeometry * geometry{nullptr};
  double t_coord{0.0};
  double horizon{30.0};
  /// Horizon of hold plans; defaults to `horizon`.
  std::optional<double> hold_horizon;
  /// Latest exit time for every dispatched vehicle.
  std::optional<double> exit_deadline;
  double dt{0.1};
  ObjectiveWeights weights;
  PhysicalParams params;
  SolverSettings settings;
  SchedulingWeights scheduling;
  std::map<LaneId, double> lane_rates;
};

struct CommCounts
{
  std::size_t central{0};
  std::size_t intra_lane{0};
  std::size_t inter_lane{0};
};

struct RoundStep
{
  VehicleId vehicle{0};
  std::vector<PrecedenceBreakdown> front;
  double tau{0.0};
  double weighted_velocity{0.0};
  SolveStatus status{SolveStatus::Optimal};
  bool held{false};
};

struct RoundResult
{
  /// Vehicles given a crossing trajectory, in scheduling order.
  std::vector<VehicleId> order;
  /// Vehicles kept upstream; they return to the next round's pool.
  std::vector<VehicleId> held;
  std::map<VehicleId, OcpSolution> plans;
  /// Input V_s plus the new entries.
  ScheduledSet scheduled;
  std::vector<RoundStep> steps;
  CommCounts comm;
  std::size_t orders_enumerated{0};
  /// Sum over all planned vehicles of the objective with the original weights on [t_C, t_C + T_c].
  double total_objective{0.0};
};

/// Sequential weighted scheduling: argmax precedence among the front set, demand-weighted speed term.
RoundResult ddswa_round(
  std::span<const CoordVehicle> pool, const ScheduledSet & scheduled, const RoundContext & ctx);

/// Same loop, earliest arrival among the front set first, original weights.
RoundResult fifo_round(
  std::span<const CoordVehicle> pool, const ScheduledSet & scheduled, const RoundContext & ctx);

/// Dispatches the pool in the given order (indices), holding vehicles whose crossing solve fails.
RoundResult sequence_round(
  std::span<const CoordVehicle> pool, std::span<const std::size_t> order,
  const ScheduledSet & scheduled, const RoundContext & ctx);

/// All orders consistent with each lane's front-to-back order, lexicographic by lane id.
std::vector<std::vector<std::size_t>> linear_extensions(std::span<const CoordVehicle> pool);

/**
 * Exhaustive search over linear extensions with fixed-sequence solves;
 * keeps the feasible order with the largest total objective. Throws
 * BatchTooLarge when the pool exceeds max_batch. When no order is
 * feasible, the first order is dispatched with holds.
 */
RoundResult combined_round(
  std::span<const CoordVehicle> pool, const ScheduledSet & scheduled, const RoundContext & ctx,
  std::size_t max_batch = 8);

}  // namespace aim
