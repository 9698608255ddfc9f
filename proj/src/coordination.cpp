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

#include "aim/coordination.hpp"

#include "aim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace aim
{

void SchedulingWeights::validate() const
{
  for (double w : {w_x, w_v, w_t, w_n, w_s, w_sigma, w_w, w_l}) {
    if (!(w >= 0.0)) throw ConfigError("scheduling weights must be nonnegative");
  }
}

SchedulingWeights SchedulingWeights::scaled(double factor) const
{
  return {w_x * factor, w_v * factor, w_t * factor, w_n * factor,
          w_s * factor, w_sigma * factor, w_w * factor, w_l * factor};
}

SchedulingWeights scheduling_profile(WeightProfile profile)
{
  switch (profile) {
    case WeightProfile::Comparison1:
    case WeightProfile::Comparison2:
      return {0.1, 5.0, 3.0, 4.5, 6.0, 40.0, 0.5, 0.02};
    case WeightProfile::Comparison3:
      return {0.5, 4.0, 3.0, 6.0, 7.0, 65.0, 1.0, 0.02};
    case WeightProfile::Comparison4:
      return {0.8, 7.0, 5.0, 5.0, 7.0, 40.0, 5.0, 0.02};
  }
  return {};
}

ObjectiveWeights objective_profile(WeightProfile profile)
{
  if (profile == WeightProfile::Comparison4) return {1.0, 1.0, 1.0};
  return {1.0, 0.0, 0.0};
}

namespace
{

std::vector<std::size_t> front_of(std::span<const CoordVehicle> pool, const std::vector<bool> & alive)
{
  std::map<LaneId, std::size_t> best;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!alive[i]) continue;
    auto it = best.find(pool[i].lane);
    if (it == best.end() || pool[i].x > pool[it->second].x) best[pool[i].lane] = i;
  }
  std::vector<std::size_t> out;
  out.reserve(best.size());
  for (const auto & [lane, idx] : best) out.push_back(idx);
  return out;
}

// Closest pool vehicle ahead on the same lane.
std::optional<std::size_t> pool_leader(std::span<const CoordVehicle> pool, std::size_t idx)
{
  std::optional<std::size_t> ahead;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    if (j == idx || pool[j].lane != pool[idx].lane || !(pool[j].x > pool[idx].x)) continue;
    if (!ahead || pool[j].x < pool[*ahead].x) ahead = j;
  }
  return ahead;
}

class Dispatcher
{
public:
  Dispatcher(std::span<const CoordVehicle> pool, const ScheduledSet & scheduled, const RoundContext & ctx)
  : pool_(pool), ctx_(ctx), done_(pool.size(), false), held_(pool.size(), false)
  {
    if (ctx.geometry == nullptr) throw ContractViolation("RoundContext: geometry is required");
    result_.scheduled = scheduled;
    result_.comm.central = pool.size();
  }

  bool done(std::size_t idx) const { return done_[idx]; }
  std::vector<bool> alive() const
  {
    std::vector<bool> out(done_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = !done_[i];
    return out;
  }
  RoundResult & result() { return result_; }

  double tau(std::size_t idx)
  {
    return min_wait_time(
      pool_[idx].lane, result_.scheduled, ctx_.t_coord, *ctx_.geometry, &result_.comm.inter_lane);
  }

  void dispatch(std::size_t idx, const ObjectiveWeights & weights, double tau, RoundStep step)
  {
    const auto & veh = pool_[idx];
    OcpSpec spec;
    spec.t0 = ctx_.t_coord;
    spec.horizon = ctx_.horizon;
    spec.dt = ctx_.dt;
    spec.x0 = veh.x;
    spec.v0 = veh.v;
    spec.u_prev = veh.u_prev;
    spec.weights = weights;
    spec.params = ctx_.params;
    spec.span = ctx_.geometry->span(veh.lane);
    spec.earliest_entry = ctx_.t_coord + tau;
    spec.require_exit_by_horizon = true;
    spec.exit_deadline = ctx_.exit_deadline;

    bool pred_held = false;
    if (const auto ahead = pool_leader(pool_, idx)) {
      if (!done_[*ahead]) throw ContractViolation("round: vehicle planned before its lane leader");
      spec.leader = Leader{result_.plans.at(pool_[*ahead].id).trajectory, pool_[*ahead].length};
      pred_held = held_[*ahead];
    } else {
      spec.leader = veh.external_leader;
    }
    if (spec.leader) ++result_.comm.intra_lane;

    OcpSolution sol;
    bool crossing = false;
    if (!pred_held) {
      sol = solve(spec, ctx_.settings);
      crossing = sol.status == SolveStatus::Optimal;
    }
    step.vehicle = veh.id;
    step.tau = tau;
    step.status = pred_held ? SolveStatus::Infeasible : sol.status;
    if (crossing) {
      const auto t_entry = crossing_time(sol.trajectory, 0.0);
      const auto t_exit = crossing_time(sol.trajectory, spec.span);
      result_.scheduled.push_back(
        {veh.id, veh.lane, t_entry.value_or(spec.t0), t_exit.value_or(sol.trajectory.t_end())});
      result_.order.push_back(veh.id);
    } else {
      OcpSpec hold = spec;
      hold.weights = ctx_.weights;
      hold.horizon = ctx_.hold_horizon.value_or(ctx_.horizon);
      sol = hold_trajectory(hold, ctx_.settings);
      held_[idx] = true;
      step.held = true;
      result_.held.push_back(veh.id);
    }
    result_.total_objective +=
      vehicle_objective(sol.trajectory, ctx_.weights, ctx_.t_coord, ctx_.horizon);
    result_.plans[veh.id] = std::move(sol);
    result_.steps.push_back(std::move(step));
    done_[idx] = true;
  }

private:
  std::span<const CoordVehicle> pool_;
  const RoundContext & ctx_;
  std::vector<bool> done_;
  std::vector<bool> held_;
  RoundResult result_;
};

}  // namespace

std::vector<std::size_t> front_set(std::span<const CoordVehicle> pool)
{
  return front_of(pool, std::vector<bool>(pool.size(), true));
}

double min_wait_time(
  LaneId lane, const ScheduledSet & scheduled, double t_coord, const LaneGeometry & geometry,
  std::size_t * reads)
{
  double tau = 0.0;
  for (const auto & e : scheduled) {
    if (!geometry.incompatible(lane, e.lane)) continue;
    if (reads) ++*reads;
    tau = std::max(tau, e.exit - t_coord);
  }
  return tau;
}

PrecedenceFeatures precedence_features(
  std::span<const CoordVehicle> pool, std::size_t index, double approach_length, double t_coord,
  double lane_rate)
{
  const auto & veh = pool[index];
  PrecedenceFeatures f;
  f.distance = approach_length + veh.x;
  f.velocity = veh.v;
  f.waited = t_coord - veh.t_arrival;
  f.lane_rate = lane_rate;
  double gap_sum = 0.0;
  std::size_t queue = 0;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    if (j == index || pool[j].lane != veh.lane || !(pool[j].x < veh.x)) continue;
    ++queue;
    gap_sum += veh.x - pool[j].x;
  }
  f.queue = static_cast<double>(queue);
  f.separation = queue > 0 ? gap_sum / static_cast<double>(queue) : 0.0;
  return f;
}

PrecedenceBreakdown precedence(
  VehicleId vehicle, const PrecedenceFeatures & f, double tau, const SchedulingWeights & w)
{
  PrecedenceBreakdown b;
  b.vehicle = vehicle;
  b.features = f;
  b.tau = tau;
  b.precedence = w.w_x * f.distance + w.w_v * f.velocity + w.w_t * f.waited + w.w_n * f.queue +
                 w.w_s * f.separation + w.w_sigma * f.lane_rate - w.w_w * tau;
  b.demand = b.precedence + w.w_w * tau;
  return b;
}

double weighted_velocity_coeff(std::span<const double> demands, double w_l, double w_velocity)
{
  if (demands.empty()) throw ContractViolation("weighted_velocity_coeff: empty front set");
  double sum = 0.0;
  for (double d : demands) sum += d;
  return w_l * (sum / static_cast<double>(demands.size())) * w_velocity;
}

ScheduledSet prune_scheduled(const ScheduledSet & scheduled, double t_now)
{
  ScheduledSet out;
  for (const auto & e : scheduled) {
    if (!(e.exit < t_now)) out.push_back(e);
  }
  return out;
}

RoundResult ddswa_round(
  std::span<const CoordVehicle> pool, const ScheduledSet & scheduled, const RoundContext & ctx)
{
  Dispatcher disp(pool, scheduled, ctx);
  std::vector<PrecedenceFeatures> features(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto rate = ctx.lane_rates.find(pool[i].lane);
    features[i] = precedence_features(
      pool, i, ctx.geometry->approach_length(), ctx.t_coord,
      rate == ctx.lane_rates.end() ? 0.0 : rate->second);
  }
  for (std::size_t left = pool.size(); left > 0; --left) {
    const auto front = front_of(pool, disp.alive());
    RoundStep step;
    std::vector<double> demands;
    std::optional<std::size_t> pick;
    double pick_tau = 0.0;
    double pick_p = 0.0;
    for (const std::size_t idx : front) {
      const double tau = disp.tau(idx);
      const auto b = precedence(pool[idx].id, features[idx], tau, ctx.scheduling);
      demands.push_back(b.demand);
      step.front.push_back(b);
      if (!pick || b.precedence > pick_p || (b.precedence == pick_p && pool[idx].id < pool[*pick].id)) {
        pick = idx;
        pick_tau = tau;
        pick_p = b.precedence;
      }
    }
    const double wbar = weighted_velocity_coeff(demands, ctx.scheduling.w_l, ctx.weights.velocity);
    step.weighted_velocity = wbar;
    ObjectiveWeights w = ctx.weights;
    w.velocity = wbar;
    disp.dispatch(*pick, w, pick_tau, std::move(step));
  }
  return std::move(disp.result());
}

RoundResult fifo_round(
  std::span<const CoordVehicle> pool, const ScheduledSet & scheduled, const RoundContext & ctx)
{
  Dispatcher disp(pool, scheduled, ctx);
  for (std::size_t left = pool.size(); left > 0; --left) {
    const auto front = front_of(pool, disp.alive());
    std::size_t pick = front.front();
    for (const std::size_t idx : front) {
      const auto & a = pool[idx];
      const auto & b = pool[pick];
      if (a.t_arrival < b.t_arrival || (a.t_arrival == b.t_arrival && a.id < b.id)) pick = idx;
    }
    RoundStep step;
    step.weighted_velocity = ctx.weights.velocity;
    disp.dispatch(pick, ctx.weights, disp.tau(pick), std::move(step));
  }
  return std::move(disp.result());
}

RoundResult sequence_round(
  std::span<const CoordVehicle> pool, std::span<const std::size_t> order,
  const ScheduledSet & scheduled, const RoundContext & ctx)
{
  if (order.size() != pool.size()) throw ContractViolation("sequence_round: order is not a permutation");
  Dispatcher disp(pool, scheduled, ctx);
  for (const std::size_t idx : order) {
    if (idx >= pool.size() || disp.done(idx)) {
      throw ContractViolation("sequence_round: order is not a permutation");
    }
    RoundStep step;
    step.weighted_velocity = ctx.weights.velocity;
    disp.dispatch(idx, ctx.weights, disp.tau(idx), std::move(step));
  }
  return std::move(disp.result());
}

std::vector<std::vector<std::size_t>> linear_extensions(std::span<const CoordVehicle> pool)
{
  std::map<LaneId, std::vector<std::size_t>> chains;
  for (std::size_t i = 0; i < pool.size(); ++i) chains[pool[i].lane].push_back(i);
  std::vector<std::vector<std::size_t>> lanes;
  for (auto & [lane, chain] : chains) {
    std::sort(chain.begin(), chain.end(), [&](std::size_t a, std::size_t b) {
      return pool[a].x > pool[b].x || (pool[a].x == pool[b].x && pool[a].id < pool[b].id);
    });
    lanes.push_back(chain);
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> heads(lanes.size(), 0);
  std::vector<std::size_t> current;
  current.reserve(pool.size());
  std::function<void()> extend = [&]() {
    if (current.size() == pool.size()) {
      out.push_back(current);
      return;
    }
    for (std::size_t l = 0; l < lanes.size(); ++l) {
      if (heads[l] == lanes[l].size()) continue;
      current.push_back(lanes[l][heads[l]++]);
      extend();
      --heads[l];
      current.pop_back();
    }
  };
  extend();
  return out;
}

RoundResult combined_round(
  std::span<const CoordVehicle> pool, const ScheduledSet & scheduled, const RoundContext & ctx,
  std::size_t max_batch)
{
  if (pool.size() > max_batch) throw BatchTooLarge(pool.size(), max_batch);
  if (ctx.geometry == nullptr) throw ContractViolation("RoundContext: geometry is required");
  const auto orders = linear_extensions(pool);

  std::vector<BatchVehicle> batch;
  batch.reserve(pool.size());
  for (const auto & v : pool) {
    batch.push_back({v.id, v.lane, v.length, v.x, v.v, v.u_prev, v.external_leader});
  }
  BatchContext bctx;
  bctx.t_coord = ctx.t_coord;
  bctx.horizon = ctx.horizon;
  bctx.dt = ctx.dt;
  bctx.weights = ctx.weights;
  bctx.params = ctx.params;
  bctx.settings = ctx.settings;

  std::optional<std::size_t> best;
  FixedSequenceResult best_result;
  for (std::size_t o = 0; o < orders.size(); ++o) {
    auto r = solve_fixed_sequence(batch, orders[o], scheduled, *ctx.geometry, bctx);
    if (!r.feasible) continue;
    if (!best || r.total_objective > best_result.total_objective) {
      best = o;
      best_result = std::move(r);
    }
  }

  RoundResult result;
  if (!best) {
    result = orders.empty() ? RoundResult{} : sequence_round(pool, orders.front(), scheduled, ctx);
    if (orders.empty()) result.scheduled = scheduled;
    result.orders_enumerated = orders.size();
    return result;
  }

  result.scheduled = scheduled;
  result.comm.central = pool.size();
  for (const std::size_t idx : orders[*best]) {
    const auto & veh = pool[idx];
    RoundStep step;
    step.vehicle = veh.id;
    step.tau = min_wait_time(
      veh.lane, result.scheduled, ctx.t_coord, *ctx.geometry, &result.comm.inter_lane);
    step.weighted_velocity = ctx.weights.velocity;
    step.status = best_result.solutions[idx].status;
    if (pool_leader(pool, idx) || veh.external_leader) ++result.comm.intra_lane;
    const auto it = std::find_if(best_result.entries.begin(), best_result.entries.end(),
                                 [&](const auto & e) { return e.vehicle == veh.id; });
    result.scheduled.push_back(*it);
    result.order.push_back(veh.id);
    result.plans[veh.id] = best_result.solutions[idx];
    result.steps.push_back(std::move(step));
  }
  result.total_objective = best_result.total_objective;
  result.orders_enumerated = orders.size();
  return result;
}

}  // namespace aim
