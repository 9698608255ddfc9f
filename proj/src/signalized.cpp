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

#include "aim/signalized.hpp"

#include "aim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aim
{

std::optional<std::size_t> SignalPlan::phase_of(LaneId lane) const
{
  for (std::size_t p = 0; p < phases.size(); ++p) {
    if (std::find(phases[p].begin(), phases[p].end(), lane) != phases[p].end()) return p;
  }
  return std::nullopt;
}

std::vector<std::vector<LaneId>> greedy_phases(const LaneGeometry & geometry)
{
  std::vector<LaneId> lanes = geometry.lanes();
  std::sort(lanes.begin(), lanes.end());
  std::vector<std::vector<LaneId>> phases;
  for (const LaneId lane : lanes) {
    bool placed = false;
    for (auto & phase : phases) {
      const bool fits = std::none_of(
        phase.begin(), phase.end(), [&](LaneId m) { return geometry.incompatible(lane, m); });
      if (fits) {
        phase.push_back(lane);
        placed = true;
        break;
      }
    }
    if (!placed) phases.push_back({lane});
  }
  return phases;
}

SignalPlan webster_timing(
  const std::map<LaneId, double> & lane_rates, double sat_flow, double lost_per_phase,
  std::vector<std::vector<LaneId>> phases)
{
  if (!(sat_flow > 0.0)) throw ConfigError("saturation flow must be positive");
  if (!(lost_per_phase >= 0.0)) throw ConfigError("lost time must be nonnegative");
  if (phases.empty()) throw ConfigError("signal plan needs at least one phase");

  std::vector<double> y(phases.size(), 0.0);
  for (std::size_t p = 0; p < phases.size(); ++p) {
    for (const LaneId lane : phases[p]) {
      const auto it = lane_rates.find(lane);
      const double rate = it == lane_rates.end() ? 0.0 : it->second;
      if (rate < 0.0) throw ConfigError("lane rates must be nonnegative");
      y[p] = std::max(y[p], rate / sat_flow);
    }
  }
  const double Y = std::accumulate(y.begin(), y.end(), 0.0);
  if (Y >= 1.0) {
    throw OversaturationError("flow ratio sum " + std::to_string(Y) + " >= 1, Webster timing undefined");
  }
  const double lost_total = lost_per_phase * static_cast<double>(phases.size());

  SignalPlan plan;
  plan.phases = std::move(phases);
  plan.cycle = (1.5 * lost_total + 5.0) / (1.0 - Y);
  const double effective = plan.cycle - lost_total;
  double t = 0.0;
  for (std::size_t p = 0; p < plan.phases.size(); ++p) {
    const double g = Y > 0.0 ? effective * y[p] / Y : effective / static_cast<double>(plan.phases.size());
    plan.offset.push_back(t);
    plan.green.push_back(g);
    plan.lost.push_back(lost_per_phase);
    t += g + lost_per_phase;
  }
  return plan;
}

std::vector<LaneId> signal_step(double t, const SignalPlan & plan)
{
  if (t < 0.0) throw ContractViolation("signal_step: negative time");
  constexpr double eps = 1e-9;
  double c = std::fmod(t, plan.cycle);
  if (c > plan.cycle - eps) c = 0.0;
  for (std::size_t p = 0; p < plan.phases.size(); ++p) {
    if (c >= plan.offset[p] - eps && c < plan.offset[p] + plan.green[p] - eps) return plan.phases[p];
  }
  return {};
}

GreenWindow next_green(const SignalPlan & plan, LaneId lane, double t)
{
  const auto p = plan.phase_of(lane);
  if (!p) throw ContractViolation("next_green: lane has no phase");
  const double k = std::ceil((t - plan.offset[*p]) / plan.cycle - 1e-9);
  const double start = plan.offset[*p] + std::max(0.0, k) * plan.cycle;
  return {start, start + plan.green[*p]};
}

std::optional<GreenWindow> green_at(const SignalPlan & plan, LaneId lane, double t)
{
  constexpr double eps = 1e-9;
  const auto p = plan.phase_of(lane);
  if (!p) throw ContractViolation("green_at: lane has no phase");
  const double start = plan.offset[*p] + std::floor((t - plan.offset[*p]) / plan.cycle + eps) * plan.cycle;
  if (t >= start - eps && t < start + plan.green[*p] - eps) return GreenWindow{start, start + plan.green[*p]};
  return std::nullopt;
}

double signal_duration(const SignalPlan & plan) { return 10.0 * plan.cycle; }

RoundResult green_dispatch(
  std::span<const CoordVehicle> lane_vehicles, const GreenWindow & window,
  const ScheduledSet & scheduled, const RoundContext & ctx)
{
  if (!lane_vehicles.empty()) {
    const LaneId lane = lane_vehicles.front().lane;
    for (const auto & v : lane_vehicles) {
      if (v.lane != lane) throw ContractViolation("green_dispatch: vehicles from several lanes");
    }
  }
  RoundContext green = ctx;
  green.t_coord = window.start;
  green.exit_deadline = window.end;
  std::vector<std::size_t> order(lane_vehicles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lane_vehicles[a].x > lane_vehicles[b].x;
  });
  return sequence_round(lane_vehicles, order, scheduled, green);
}

}  // namespace aim
