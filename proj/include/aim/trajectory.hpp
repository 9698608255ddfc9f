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

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace aim
{

/**
 * Double-integrator trajectory with piecewise-constant acceleration on a
 * fixed grid t_k = t0 + k dt.
 *
 * Samples satisfy v[k+1] = v[k] + u[k] dt and
 * x[k+1] = x[k] + v[k] dt + u[k] dt^2 / 2 exactly. Queries past the last
 * sample extrapolate at constant terminal velocity with zero acceleration.
 */
struct SampledTrajectory
{
  double t0{0.0};
  double dt{0.1};
  std::vector<double> u;  // N
  std::vector<double> v;  // N + 1
  std::vector<double> x;  // N + 1
  double u_prev{0.0};

  std::size_t steps() const { return u.size(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return time(steps()); }

  /// Grid index of time t relative to t0 (rounded to the nearest step).
  long index_of(double t) const;

  // Sample k of the extended trajectory; k may exceed N.
  double position_at(long k) const;
  double velocity_at(long k) const;
  double accel_at(long k) const;
};

SampledTrajectory integrate(
  double x0, double v0, std::span<const double> u, double dt, double t0 = 0.0, double u_prev = 0.0);

/// First time x(t) >= pos by linear interpolation between straddling samples.
std::optional<double> crossing_time(const SampledTrajectory & traj, double pos);

/**
 * Trajectory starting at grid time t_start covering `steps` steps, read from
 * the extended trajectory. t_start must lie on traj's grid at or after t0.
 */
SampledTrajectory window(const SampledTrajectory & traj, double t_start, std::size_t steps);

/// Keep `head` up to t_split and continue with `tail` (which must start at t_split).
SampledTrajectory splice(const SampledTrajectory & head, const SampledTrajectory & tail);

struct ObjectiveWeights
{
  double velocity{1.0};
  double accel{0.0};
  double jerk{0.0};
};

/**
 * Running reward sum_k [W_v v_k - (W_a u_k^2 + W_j j_k^2)] dt over the window
 * [t_start, t_start + horizon), left Riemann, jerk j_k = (u_k - u_{k-1}) / dt
 * with u_{-1} taken from the sample preceding the window (u_prev at t0).
 */
double vehicle_objective(
  const SampledTrajectory & traj, const ObjectiveWeights & w, double t_start, double horizon);

enum class BoundQuantity { AccelLow, AccelHigh, VelocityLow, VelocityHigh };

struct BoundViolation
{
  std::size_t index{0};
  BoundQuantity quantity{BoundQuantity::AccelLow};
  double magnitude{0.0};
};

std::vector<BoundViolation> check_bounds(
  const SampledTrajectory & traj, const PhysicalParams & params, double tol);

/// CSV with header "vehicle,t,x,v,u"; u is empty on the final sample.
void write_trajectory_csv(std::ostream & os, const SampledTrajectory & traj, VehicleId vehicle);

}  // namespace aim
