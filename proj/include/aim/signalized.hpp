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

#include "aim/coordination.hpp"
#include "aim/model.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace aim
{

/// Fixed-time plan. Phase p is green on [offset_p, offset_p + green_p) of each cycle,
/// followed by lost_p seconds with every lane red.
struct SignalPlan
{
  std::vector<std::vector<LaneId>> phases;
  double cycle{0.0};
  std::vector<double> green;
  std::vector<double> lost;
  std::vector<double> offset;

  std::optional<std::size_t> phase_of(LaneId lane) const;
};

/// Greedy coloring of the lane incompatibility graph, lanes taken in id order.
std::vector<std::vector<LaneId>> greedy_phases(const LaneGeometry & geometry);

/**
 * Webster cycle C = (1.5 L + 5) / (1 - Y) with L the total lost time and
 * Y the sum of per-phase critical flow ratios; greens split (C - L) in
 * proportion to the critical ratios. Throws OversaturationError for Y >= 1.
 */
SignalPlan webster_timing(
  const std::map<LaneId, double> & lane_rates, double sat_flow, double lost_per_phase,
  std::vector<std::vector<LaneId>> phases);

/// Lanes showing green at time t.
std::vector<LaneId> signal_step(double t, const SignalPlan & plan);

struct GreenWindow
{
  double start{0.0};
  double end{0.0};
};

/// First green window of `lane` starting at or after t.
GreenWindow next_green(const SignalPlan & plan, LaneId lane, double t);

/// Green window of `lane` containing t, if the lane shows green at t.
std::optional<GreenWindow> green_at(const SignalPlan & plan, LaneId lane, double t);

/// Ten cycles.
double signal_duration(const SignalPlan & plan);

/**
 * Dispatches the vehicles of one lane at the start of its green window, in
 * in-lane order, each required to enter no earlier than the window start
 * and to exit by its end. Vehicles that cannot are held, as is everyone
 * behind them. ctx.t_coord is replaced by the window start.
 */
RoundResult green_dispatch(
  std::span<const CoordVehicle> lane_vehicles, const GreenWindow & window,
  const ScheduledSet & scheduled, const RoundContext & ctx);

}  // namespace aim
