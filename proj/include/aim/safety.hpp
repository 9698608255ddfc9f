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
#include "aim/trajectory.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace aim
{

struct SafetyMargins
{
  double rear_end_tol{1e-6};
  double overlap_tol{1e-6};
  double envelope_tol{1e-6};
};

/// D(v_i, v_j) = L_j + r + max{0, (v_i^2 - v_j^2) / (-2 u_min)}.
double safe_following_distance(double v_i, double v_j, double L_j, double r, double u_min);

/**
 * Sampled-time tightening of safe_following_distance:
 * L_j + r + max{0, (v_i^2 + |u_min| dt v_i - v_j^2) / (2 |u_min|)}.
 *
 * A gap of at least this size can be kept at every grid sample by full
 * braking of the follower, whatever admissible control the leader applies.
 * Reduces to safe_following_distance at dt = 0.
 */
double discrete_following_distance(
  double v_i, double v_j, double L_j, double r, double u_min, double dt);

/**
 * Sampled-time envelope value v^2 + |u_min| dt v + 2 |u_min| x. Nonpositive
 * values can be kept nonpositive (and x <= 0) at every sample by braking.
 */
double discrete_envelope(double x, double v, double u_min, double dt);

struct RearEndSample
{
  std::size_t index{0};  // follower sample index
  double margin{0.0};
};

struct RearEndReport
{
  double min_margin{std::numeric_limits<double>::infinity()};
  std::vector<RearEndSample> violations;
  bool ok() const { return violations.empty(); }
};

/**
 * Per-sample margin x_j - x_i - D(v_i, v_j) of follower i behind leader j.
 *
 * Both trajectories must live on the same time grid. The leader is read
 * through its constant-velocity extension. When `follower_limit` is given,
 * only samples with x_i <= follower_limit are checked.
 */
RearEndReport rear_end_ok(
  const SampledTrajectory & follower, const SampledTrajectory & leader, double L_j, double r,
  double u_min, double tol, std::optional<double> follower_limit = std::nullopt);

/// sqrt(2 |u_min| (-x)); the largest speed from which full braking stops by x = 0.
double entry_prevention_cap(double x, double u_min);

/// Samples with x <= 0 whose speed exceeds the entry-prevention cap by more than tol.
std::vector<std::size_t> envelope_violations(
  const SampledTrajectory & traj, double u_min, double tol);

bool intersection_overlap_ok(
  double entry_i, double exit_i, double entry_k, double exit_k, double tol = 0.0);

struct LeaderState
{
  double x{0.0};
  double v{0.0};
  double length{4.3};
};

enum class GateDecision { Admit, Delay };

/// dt > 0 switches to the sampled-time distance and envelope.
GateDecision arrival_gate(
  double v_arrival, const std::optional<LeaderState> & leader, const LaneGeometry & geometry,
  const PhysicalParams & params, double dt = 0.0);

/// Aggregate counts and worst margins from a post-hoc sweep.
struct SafetyReport
{
  std::size_t rear_end_pairs_checked{0};
  std::size_t rear_end_violations{0};
  double worst_rear_end_margin{std::numeric_limits<double>::infinity()};
  std::size_t overlap_pairs_checked{0};
  std::size_t overlap_violations{0};
  /// min over incompatible pairs of max(e_i - x_k, e_k - x_i); negative means overlap.
  double worst_overlap_separation{std::numeric_limits<double>::infinity()};
  std::size_t envelope_violations{0};
  std::size_t bound_violations{0};

  bool ok() const
  {
    return rear_end_violations == 0 && overlap_violations == 0 && envelope_violations == 0 &&
           bound_violations == 0;
  }
};

}  // namespace aim
