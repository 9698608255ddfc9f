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

#include "aim/safety.hpp"

#include "aim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace aim
{

double safe_following_distance(double v_i, double v_j, double L_j, double r, double u_min)
{
  if (!(u_min < 0.0)) throw DomainError("safe_following_distance: u_min must be negative");
  return L_j + r + std::max(0.0, (v_i * v_i - v_j * v_j) / (-2.0 * u_min));
}

double discrete_following_distance(
  double v_i, double v_j, double L_j, double r, double u_min, double dt)
{
  if (!(u_min < 0.0)) throw DomainError("discrete_following_distance: u_min must be negative");
  const double a = -u_min;
  return L_j + r + std::max(0.0, (v_i * v_i + a * dt * v_i - v_j * v_j) / (2.0 * a));
}

double discrete_envelope(double x, double v, double u_min, double dt)
{
  const double a = -u_min;
  return v * v + a * dt * v + 2.0 * a * x;
}

RearEndReport rear_end_ok(
  const SampledTrajectory & follower, const SampledTrajectory & leader, double L_j, double r,
  double u_min, double tol, std::optional<double> follower_limit)
{
  if (std::abs(follower.dt - leader.dt) > 1e-12) {
    throw ContractViolation("rear_end_ok: trajectories use different time steps");
  }
  const double offset = (follower.t0 - leader.t0) / leader.dt;
  if (std::abs(offset - std::round(offset)) > 1e-6) {
    throw ContractViolation("rear_end_ok: trajectories are not on a common grid");
  }
  const long shift = std::lround(offset);
  RearEndReport report;
  for (std::size_t k = 0; k < follower.x.size(); ++k) {
    const long lk = shift + static_cast<long>(k);
    if (lk < 0) continue;
    if (follower_limit && follower.x[k] > *follower_limit) break;
    const double gap = leader.position_at(lk) - follower.x[k];
    const double margin =
      gap - safe_following_distance(follower.v[k], leader.velocity_at(lk), L_j, r, u_min);
    report.min_margin = std::min(report.min_margin, margin);
    if (margin < -tol) report.violations.push_back({k, margin});
  }
  return report;
}

double entry_prevention_cap(double x, double u_min)
{
  if (x > 0.0) throw DomainError("entry_prevention_cap: undefined past the stop line");
  if (!(u_min < 0.0)) throw DomainError("entry_prevention_cap: u_min must be negative");
  return std::sqrt(2.0 * u_min * x);
}

std::vector<std::size_t> envelope_violations(
  const SampledTrajectory & traj, double u_min, double tol)
{
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < traj.x.size(); ++k) {
    if (traj.x[k] > 0.0) break;
    if (traj.v[k] > entry_prevention_cap(traj.x[k], u_min) + tol) out.push_back(k);
  }
  return out;
}

bool intersection_overlap_ok(double entry_i, double exit_i, double entry_k, double exit_k, double tol)
{
  return entry_i >= exit_k - tol || entry_k >= exit_i - tol;
}

GateDecision arrival_gate(
  double v_arrival, const std::optional<LeaderState> & leader, const LaneGeometry & geometry,
  const PhysicalParams & params, double dt)
{
  const double d = geometry.approach_length();
  const double cap = std::min(params.v_max, entry_prevention_cap(-d, params.u_min));
  if (v_arrival > cap) return GateDecision::Delay;
  if (dt > 0.0 && discrete_envelope(-d, v_arrival, params.u_min, dt) > 0.0) return GateDecision::Delay;
  if (!leader) return GateDecision::Admit;
  const double gap = leader->x - (-d);
  const double need = discrete_following_distance(
    v_arrival, leader->v, leader->length, params.robustness, params.u_min, dt);
  return gap >= need ? GateDecision::Admit : GateDecision::Delay;
}

}  // namespace aim
