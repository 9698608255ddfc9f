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
#include "aim/safety.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace aim::testing
{

/// Largest speed at x whose sampled braking envelope stays nonpositive with a small back-off.
inline double sampled_cap(double x, double u_min, double dt)
{
  const double a = -u_min;
  const double xs = std::min(0.0, x + 0.01);
  return std::max(0.0, (-a * dt + std::sqrt(a * a * dt * dt - 8.0 * a * xs)) / 2.0);
}

struct BatchDraw
{
  std::vector<CoordVehicle> pool;
  ScheduledSet scheduled;
};

/**
 * Random pool of n vehicles on the four standard lanes, each satisfying the
 * envelope and the sampled rear-end distance to the vehicle ahead, plus a
 * few mutually disjoint scheduled entries exiting around `busy` seconds after t_coord.
 */
inline BatchDraw random_batch(std::mt19937_64 & rng, std::size_t n, double t_coord, double busy)
{
  const PhysicalParams params;
  const double dt = 0.1;
  std::uniform_int_distribution<int> lane_pick(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const LaneId lanes[4] = {2, 5, 8, 11};
  BatchDraw out;
  std::map<LaneId, std::vector<std::size_t>> per_lane;
  for (std::size_t i = 0; i < n; ++i) per_lane[lanes[lane_pick(rng)]].push_back(i);
  VehicleId next_id = 1;
  for (auto & [lane, members] : per_lane) {
    double x_ahead = 0.0;
    double v_ahead = 0.0;
    bool has_ahead = false;
    for (std::size_t k = 0; k < members.size(); ++k) {
      CoordVehicle v;
      v.id = next_id++;
      v.lane = lane;
      v.t_arrival = t_coord - 3.0 * unit(rng);
      double x = has_ahead ? x_ahead - 6.0 - 12.0 * unit(rng) : -5.0 - 40.0 * unit(rng);
      x = std::max(x, -60.0);
      double vmax = std::min(params.v_max, sampled_cap(x, params.u_min, dt));
      double speed = vmax * unit(rng);
      if (has_ahead) {
        for (int tries = 0; tries < 60; ++tries) {
          const double need =
            discrete_following_distance(speed, v_ahead, 4.3, params.robustness, params.u_min, dt);
          if (x_ahead - x >= need + 0.05) break;
          speed *= 0.8;
          if (tries > 40) x -= 0.5;
        }
      }
      v.x = x;
      v.v = speed;
      out.pool.push_back(v);
      x_ahead = x;
      v_ahead = speed;
      has_ahead = true;
    }
  }
  std::uniform_int_distribution<int> entries(0, 3);
  const int m = busy > 0.0 ? entries(rng) : 0;
  double last_exit = t_coord - 4.0;
  for (int e = 0; e < m; ++e) {
    const double exit = std::max(last_exit + 2.0, t_coord + busy * unit(rng));
    out.scheduled.push_back({1000 + e, lanes[lane_pick(rng)], exit - 2.0, exit});
    last_exit = exit;
  }
  return out;
}

}  // namespace aim::testing
