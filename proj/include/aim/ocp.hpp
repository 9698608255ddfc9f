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
#include "aim/schedule.hpp"
#include "aim/trajectory.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace aim
{

struct SolverSettings
{
  /// Stationarity and complementarity tolerance.
  double tolerance{1e-6};
  /// Constraint residual tolerance; tighter than `tolerance` so that
  /// checkers at 1e-6 never see solver slack.
  double primal_tolerance{1e-9};
  int max_iterations{200};
  /// Stop-line back-off of the entry-prevention envelope (m).
  double stop_margin{1e-3};
  /// Back-off used by the entry-time and exit-deadline constraints (m).
  double entry_margin{1e-5};
};

struct Leader
{
  SampledTrajectory trajectory;
  double length{4.3};
};

/**
 * One longitudinal trajectory problem on the grid t0 + k dt, k = 0..N with
 * N = horizon / dt. Decision variables are the N accelerations.
 */
struct OcpSpec
{
  double t0{0.0};
  double horizon{30.0};
  double dt{0.1};
  double x0{0.0};
  double v0{0.0};
  double u_prev{0.0};
  ObjectiveWeights weights;
  PhysicalParams params;
  std::optional<Leader> leader;
  bool entry_prevention{false};
  /// Earliest intersection entry time; x <= 0 on every grid point up to it.
  std::optional<double> earliest_entry;
  /// x(t0 + horizon) >= span.
  bool require_exit_by_horizon{false};
  /// Latest exit time, rounded down to the grid.
  std::optional<double> exit_deadline;
  double span{20.0};

  std::size_t steps() const;
  /// Throws ContractViolation when the invariants are broken.
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, IterLimit };

std::string_view to_string(SolveStatus status);

struct OcpSolution
{
  SampledTrajectory trajectory;
  double objective{0.0};
  SolveStatus status{SolveStatus::Infeasible};
  double kkt_residual{0.0};
  int iterations{0};
  /// Set by hold_trajectory when the emergency-braking fallback was used.
  bool fallback{false};
};

/**
 * Maximizes sum_k [W_v v_k - W_a u_k^2 - W_j ((u_k - u_{k-1}) / dt)^2] dt
 * subject to the enabled constraints, using a primal-dual interior-point
 * method (Mehrotra centering rule, backtracking on the KKT residual norm).
 * Newton systems are solved by a Riccati recursion over the stage
 * structure, so each iteration is O(N).
 */
OcpSolution solve(const OcpSpec & spec, const SolverSettings & settings = {});

/**
 * Keeps a vehicle upstream of the stop line for the whole horizon
 * (entry prevention on, no exit requirement). Falls back to emergency
 * braking if the solver does not converge.
 */
OcpSolution hold_trajectory(const OcpSpec & spec, const SolverSettings & settings = {});

/// Full braking to a stop (last step u = -v/dt), then standing still.
SampledTrajectory braking_trajectory(
  double t0, double x0, double v0, double u_prev, double dt, std::size_t steps, double u_min);

/// A vehicle taking part in a fixed-sequence batch solve.
struct BatchVehicle
{
  VehicleId id{0};
  LaneId lane{0};
  double length{4.3};
  double x0{0.0};
  double v0{0.0};
  double u_prev{0.0};
  /// Leader already committed outside the batch (ignored when the leader is in the batch).
  std::optional<Leader> external_leader;
};

struct BatchContext
{
  double t_coord{0.0};
  double horizon{30.0};
  double dt{0.1};
  ObjectiveWeights weights;
  PhysicalParams params;
  SolverSettings settings;
};

struct FixedSequenceResult
{
  /// Indexed like the batch.
  std::vector<OcpSolution> solutions;
  std::vector<ScheduleEntry> entries;
  double total_objective{0.0};
  bool feasible{false};
};

/**
 * Solves batch vehicles one after another in `order` (indices into batch).
 * Each vehicle's earliest entry is the latest exit among already-fixed
 * vehicles on incompatible lanes (from `scheduled` or earlier in the order),
 * and its leader is the closest vehicle ahead on its lane that was fixed
 * earlier in the order, else its external leader. Exit by the horizon is
 * required; the first failure stops the sweep with feasible = false.
 */
FixedSequenceResult solve_fixed_sequence(
  std::span<const BatchVehicle> batch, std::span<const std::size_t> order,
  const ScheduledSet & scheduled, const LaneGeometry & geometry, const BatchContext & ctx);

}  // namespace aim
