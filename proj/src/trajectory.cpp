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

#include "aim/trajectory.hpp"

#include "aim/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace aim
{

long SampledTrajectory::index_of(double t) const { return std::lround((t - t0) / dt); }

double SampledTrajectory::position_at(long k) const
{
  const long n = static_cast<long>(steps());
  if (k <= n) return x[static_cast<std::size_t>(std::max(k, 0L))];
  return x.back() + v.back() * dt * static_cast<double>(k - n);
}

double SampledTrajectory::velocity_at(long k) const
{
  const long n = static_cast<long>(steps());
  return v[static_cast<std::size_t>(std::clamp(k, 0L, n))];
}

double SampledTrajectory::accel_at(long k) const
{
  if (k < 0) return u_prev;
  if (k >= static_cast<long>(steps())) return 0.0;
  return u[static_cast<std::size_t>(k)];
}

SampledTrajectory integrate(
  double x0, double v0, std::span<const double> u, double dt, double t0, double u_prev)
{
  if (!(dt > 0.0)) throw ContractViolation("integrate: dt must be positive");
  SampledTrajectory traj;
  traj.t0 = t0;
  traj.dt = dt;
  traj.u_prev = u_prev;
  traj.u.assign(u.begin(), u.end());
  traj.x.resize(u.size() + 1);
  traj.v.resize(u.size() + 1);
  traj.x[0] = x0;
  traj.v[0] = v0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    traj.v[k + 1] = traj.v[k] + u[k] * dt;
    traj.x[k + 1] = traj.x[k] + traj.v[k] * dt + 0.5 * u[k] * dt * dt;
  }
  return traj;
}

std::optional<double> crossing_time(const SampledTrajectory & traj, double pos)
{
  if (traj.x.empty()) return std::nullopt;
  if (traj.x[0] >= pos) return traj.t0;
  for (std::size_t k = 0; k + 1 < traj.x.size(); ++k) {
    const double a = traj.x[k];
    const double b = traj.x[k + 1];
    if (b >= pos && b > a) {
      return traj.time(k) + traj.dt * (pos - a) / (b - a);
    }
  }
  return std::nullopt;
}

SampledTrajectory window(const SampledTrajectory & traj, double t_start, std::size_t steps)
{
  const long k0 = traj.index_of(t_start);
  if (k0 < 0) throw ContractViolation("window: start precedes trajectory");
  SampledTrajectory out;
  out.t0 = t_start;
  out.dt = traj.dt;
  out.u_prev = traj.accel_at(k0 - 1);
  out.u.resize(steps);
  out.v.resize(steps + 1);
  out.x.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const long idx = k0 + static_cast<long>(k);
    out.x[k] = traj.position_at(idx);
    out.v[k] = traj.velocity_at(idx);
    if (k < steps) out.u[k] = traj.accel_at(idx);
  }
  return out;
}

SampledTrajectory splice(const SampledTrajectory & head, const SampledTrajectory & tail)
{
  const long cut = head.index_of(tail.t0);
  if (cut < 0 || cut > static_cast<long>(head.steps())) {
    throw ContractViolation("splice: tail must start within the head trajectory");
  }
  SampledTrajectory out;
  out.t0 = head.t0;
  out.dt = head.dt;
  out.u_prev = head.u_prev;
  const auto c = static_cast<std::size_t>(cut);
  out.u.assign(head.u.begin(), head.u.begin() + static_cast<long>(c));
  out.x.assign(head.x.begin(), head.x.begin() + static_cast<long>(c));
  out.v.assign(head.v.begin(), head.v.begin() + static_cast<long>(c));
  out.u.insert(out.u.end(), tail.u.begin(), tail.u.end());
  out.x.insert(out.x.end(), tail.x.begin(), tail.x.end());
  out.v.insert(out.v.end(), tail.v.begin(), tail.v.end());
  return out;
}

double vehicle_objective(
  const SampledTrajectory & traj, const ObjectiveWeights & w, double t_start, double horizon)
{
  if (t_start < traj.t0 - 1e-9) {
    throw ContractViolation("vehicle_objective: window starts before the trajectory");
  }
  const long k0 = traj.index_of(t_start);
  const long n = std::lround(horizon / traj.dt);
  const double dt = traj.dt;
  double total = 0.0;
  double prev = traj.accel_at(k0 - 1);
  for (long k = k0; k < k0 + n; ++k) {
    const double u = traj.accel_at(k);
    const double jerk = (u - prev) / dt;
    total += (w.velocity * traj.velocity_at(k) - (w.accel * u * u + w.jerk * jerk * jerk)) * dt;
    prev = u;
  }
  return total;
}

std::vector<BoundViolation> check_bounds(
  const SampledTrajectory & traj, const PhysicalParams & params, double tol)
{
  std::vector<BoundViolation> out;
  for (std::size_t k = 0; k < traj.u.size(); ++k) {
    const double u = traj.u[k];
    if (u < params.u_min - tol) out.push_back({k, BoundQuantity::AccelLow, params.u_min - u});
    if (u > params.u_max + tol) out.push_back({k, BoundQuantity::AccelHigh, u - params.u_max});
  }
  for (std::size_t k = 0; k < traj.v.size(); ++k) {
    const double v = traj.v[k];
    if (v < params.v_min - tol) out.push_back({k, BoundQuantity::VelocityLow, params.v_min - v});
    if (v > params.v_max + tol) out.push_back({k, BoundQuantity::VelocityHigh, v - params.v_max});
  }
  return out;
}

void write_trajectory_csv(std::ostream & os, const SampledTrajectory & traj, VehicleId vehicle)
{
  os << "vehicle,t,x,v,u\n";
  for (std::size_t k = 0; k < traj.x.size(); ++k) {
    os << fmt::format("{},{:.6f},{:.9f},{:.9f},", vehicle, traj.time(k), traj.x[k], traj.v[k]);
    if (k < traj.u.size()) os << fmt::format("{:.9f}", traj.u[k]);
    os << '\n';
  }
}

}  // namespace aim
