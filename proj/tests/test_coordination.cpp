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

#include "doctest.h"
#include "fixtures.hpp"

#include "aim/coordination.hpp"
#include "aim/errors.hpp"
#include "aim/safety.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace aim;

namespace
{

CoordVehicle make(VehicleId id, LaneId lane, double x, double v, double t_arrival = 0.0)
{
  CoordVehicle c;
  c.id = id;
  c.lane = lane;
  c.x = x;
  c.v = v;
  c.t_arrival = t_arrival;
  return c;
}

RoundContext context(const LaneGeometry & geo)
{
  RoundContext ctx;
  ctx.geometry = &geo;
  ctx.t_coord = 3.0;
  ctx.lane_rates = {{2, 0.05}, {5, 0.05}, {8, 0.05}, {11, 0.05}};
  return ctx;
}

void check_schedule_safe(const RoundResult & r, const LaneGeometry & geo)
{
  for (std::size_t a = 0; a < r.scheduled.size(); ++a) {
    for (std::size_t b = a + 1; b < r.scheduled.size(); ++b) {
      const auto & ea = r.scheduled[a];
      const auto & eb = r.scheduled[b];
      if (!geo.incompatible(ea.lane, eb.lane)) continue;
      CHECK(intersection_overlap_ok(ea.entry, ea.exit, eb.entry, eb.exit, 1e-6));
    }
  }
}

}  // namespace

TEST_CASE("front set")
{
  CHECK(front_set(std::vector<CoordVehicle>{}).empty());
  std::vector<CoordVehicle> one_lane{make(1, 2, -50, 5), make(2, 2, -30, 5), make(3, 2, -10, 5)};
  CHECK(front_set(one_lane) == std::vector<std::size_t>{2});
  std::vector<CoordVehicle> four{make(1, 11, -50, 5), make(2, 2, -30, 5), make(3, 5, -10, 5),
                                 make(4, 8, -20, 5)};
  CHECK(front_set(four) == std::vector<std::size_t>{1, 2, 3, 0});
}

TEST_CASE("minimum wait time")
{
  const auto geo = LaneGeometry::standard_four_way();
  CHECK(min_wait_time(2, {}, 10.0, geo) == 0.0);
  CHECK(min_wait_time(2, {{1, 5, 9.0, 12.0}}, 10.0, geo) == doctest::Approx(2.0));
  CHECK(min_wait_time(2, {{1, 5, 6.0, 9.0}, {2, 11, 10.0, 13.0}}, 10.0, geo) == doctest::Approx(3.0));
  CHECK(min_wait_time(2, {{1, 8, 9.0, 30.0}}, 10.0, geo) == 0.0);
  std::size_t reads = 0;
  min_wait_time(2, {{1, 5, 6.0, 9.0}, {2, 11, 10.0, 13.0}, {3, 8, 1.0, 40.0}}, 10.0, geo, &reads);
  CHECK(reads == 2);
}

TEST_CASE("precedence index")
{
  const auto w = scheduling_profile(WeightProfile::Comparison1);
  PrecedenceFeatures f{30.0, 10.0, 4.0, 2.0, 15.0, 0.05};
  const auto b = precedence(1, f, 2.0, w);
  CHECK(b.precedence == doctest::Approx(165.0));
  CHECK(b.demand == doctest::Approx(166.0));
  const auto c = precedence(1, f, 0.0, w);
  CHECK(c.precedence == doctest::Approx(166.0));
  CHECK(c.demand == doctest::Approx(166.0));
  CHECK(precedence(1, PrecedenceFeatures{}, 0.0, w).precedence == 0.0);
}

TEST_CASE("precedence features from the pool")
{
  std::vector<CoordVehicle> pool{make(1, 2, -10.0, 8.0, 1.0), make(2, 2, -25.0, 8.0),
                                 make(3, 2, -35.0, 8.0), make(4, 5, -12.0, 3.0)};
  const auto f = precedence_features(pool, 0, 60.0, 3.0, 0.07);
  CHECK(f.distance == doctest::Approx(50.0));
  CHECK(f.velocity == 8.0);
  CHECK(f.waited == doctest::Approx(2.0));
  CHECK(f.queue == 2.0);
  CHECK(f.separation == doctest::Approx((15.0 + 25.0) / 2.0));
  CHECK(f.lane_rate == 0.07);
  const auto g = precedence_features(pool, 3, 60.0, 3.0, 0.07);
  CHECK(g.queue == 0.0);
  CHECK(g.separation == 0.0);
}

TEST_CASE("weighted velocity coefficient")
{
  CHECK(weighted_velocity_coeff(std::vector<double>{166.0}, 0.02, 1.0) == doctest::Approx(3.32));
  CHECK(weighted_velocity_coeff(std::vector<double>{0.0, 0.0}, 0.02, 1.0) == 0.0);
  CHECK(weighted_velocity_coeff(std::vector<double>{100.0, 200.0}, 0.02, 1.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(weighted_velocity_coeff(std::vector<double>{}, 0.02, 1.0), ContractViolation);
}

TEST_CASE("pruning the scheduled set")
{
  const auto geo = LaneGeometry::standard_four_way();
  CHECK(prune_scheduled({{1, 2, 1.0, 2.0}, {2, 5, 2.0, 4.0}}, 5.0).empty());
  const auto kept = prune_scheduled({{1, 2, 1.0, 2.0}, {2, 5, 2.0, 6.0}}, 5.0);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].vehicle == 2);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(0.0, 20.0);
  std::uniform_int_distribution<int> l(0, 3);
  const LaneId lanes[4] = {2, 5, 8, 11};
  for (int trial = 0; trial < 200; ++trial) {
    ScheduledSet vs;
    for (int i = 0; i < 6; ++i) {
      const double exit = t(rng);
      vs.push_back({i, lanes[l(rng)], exit - 1.0, exit});
    }
    const double now = t(rng);
    const auto pruned = prune_scheduled(vs, now);
    for (LaneId q : lanes) CHECK(min_wait_time(q, vs, now, geo) == min_wait_time(q, pruned, now, geo));
  }
}

TEST_CASE("weight profiles")
{
  const auto c3 = scheduling_profile(WeightProfile::Comparison3);
  CHECK(c3.w_x == 0.5);
  CHECK(c3.w_sigma == 65.0);
  const auto c4 = scheduling_profile(WeightProfile::Comparison4);
  CHECK(c4.w_w == 5.0);
  CHECK(objective_profile(WeightProfile::Comparison4).jerk == 1.0);
  CHECK(objective_profile(WeightProfile::Comparison2).accel == 0.0);
  auto bad = c3;
  bad.w_n = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("single vehicle round equals a single solve")
{
  const auto geo = LaneGeometry::standard_four_way();
  const auto ctx = context(geo);
  std::vector<CoordVehicle> pool{make(1, 2, -30.0, 9.0, 1.0)};
  OcpSpec spec;
  spec.t0 = 3.0;
  spec.x0 = -30.0;
  spec.v0 = 9.0;
  spec.earliest_entry = 3.0;
  spec.require_exit_by_horizon = true;
  const auto ref = solve(spec);
  for (const auto & r : {fifo_round(pool, {}, ctx), combined_round(pool, {}, ctx)}) {
    REQUIRE(r.order == std::vector<VehicleId>{1});
    CHECK(r.plans.at(1).objective == doctest::Approx(ref.objective).epsilon(1e-9));
    CHECK(r.comm.central == 1);
    CHECK(r.comm.intra_lane == 0);
    CHECK(r.comm.inter_lane == 0);
  }
  const auto d = ddswa_round(pool, {}, ctx);
  REQUIRE(d.order == std::vector<VehicleId>{1});
  CHECK(d.plans.at(1).trajectory.x.back() == doctest::Approx(ref.trajectory.x.back()).epsilon(1e-6));
  CHECK(d.total_objective == doctest::Approx(ref.objective).epsilon(1e-6));
}

TEST_CASE("higher precedence goes first on incompatible lanes")
{
  const auto geo = LaneGeometry::standard_four_way();
  const auto ctx = context(geo);
  std::vector<CoordVehicle> pool{make(1, 5, -40.0, 6.0, 2.0), make(2, 2, -20.0, 10.0, 1.0)};
  const auto r = ddswa_round(pool, {}, ctx);
  REQUIRE(r.order.size() == 2);
  CHECK(r.order[0] == 2);
  CHECK(r.steps.size() == 2);
  CHECK(r.steps[0].front.size() == 2);
  check_schedule_safe(r, geo);
  const auto & a = r.scheduled[0];
  const auto & b = r.scheduled[1];
  CHECK(b.entry >= a.exit - 1e-6);
  CHECK(r.steps[1].tau > 0.0);
  CHECK(r.comm.inter_lane >= 1);
}

TEST_CASE("compatible lanes do not delay each other")
{
  const auto geo = LaneGeometry::standard_four_way();
  const auto ctx = context(geo);
  std::vector<CoordVehicle> pool{make(1, 2, -30.0, 8.0), make(2, 8, -25.0, 9.0)};
  const auto r = ddswa_round(pool, {}, ctx);
  REQUIRE(r.order.size() == 2);
  for (const auto & step : r.steps) CHECK(step.tau == 0.0);
  for (const auto & v : pool) {
    OcpSpec spec;
    spec.t0 = 3.0;
    spec.x0 = v.x;
    spec.v0 = v.v;
    spec.earliest_entry = 3.0;
    spec.require_exit_by_horizon = true;
    const auto ref = solve(spec);
    const auto it = std::find_if(r.scheduled.begin(), r.scheduled.end(),
                                 [&](const auto & e) { return e.vehicle == v.id; });
    CHECK(it->entry == doctest::Approx(*crossing_time(ref.trajectory, 0.0)).epsilon(1e-6));
  }
}

TEST_CASE("fifo picks the earliest arrival")
{
  const auto geo = LaneGeometry::standard_four_way();
  const auto ctx = context(geo);
  std::vector<CoordVehicle> pool{make(1, 5, -20.0, 8.0, 2.0), make(2, 2, -40.0, 8.0, 1.0)};
  const auto r = fifo_round(pool, {}, ctx);
  REQUIRE(r.order.size() == 2);
  CHECK(r.order[0] == 2);
  check_schedule_safe(r, geo);
}

TEST_CASE("linear extensions")
{
  std::vector<CoordVehicle> pool{make(1, 2, -10, 5), make(2, 2, -30, 5), make(3, 5, -12, 5),
                                 make(4, 5, -35, 5)};
  const auto orders = linear_extensions(pool);
  CHECK(orders.size() == 6);
  for (const auto & o : orders) {
    const auto pos = [&](std::size_t idx) { return std::find(o.begin(), o.end(), idx) - o.begin(); };
    CHECK(pos(0) < pos(1));
    CHECK(pos(2) < pos(3));
  }
  CHECK(orders.front() == std::vector<std::size_t>{0, 1, 2, 3});
  std::vector<CoordVehicle> three_lanes{make(1, 2, -10, 5), make(2, 5, -10, 5), make(3, 8, -10, 5)};
  CHECK(linear_extensions(three_lanes).size() == 6);
}

TEST_CASE("combined enumerates and beats fifo")
{
  const auto geo = LaneGeometry::standard_four_way();
  const auto ctx = context(geo);
  std::vector<CoordVehicle> pool{make(1, 2, -15, 7), make(2, 2, -35, 7), make(3, 5, -12, 6),
                                 make(4, 5, -40, 9)};
  const auto c = combined_round(pool, {}, ctx);
  CHECK(c.orders_enumerated == 6);
  CHECK(c.held.empty());
  check_schedule_safe(c, geo);
  const auto f = fifo_round(pool, {}, ctx);
  CHECK(c.total_objective >= f.total_objective - 1e-4 * std::abs(f.total_objective));
  CHECK_THROWS_AS(combined_round(pool, {}, ctx, 3), BatchTooLarge);
}

TEST_CASE("single lane forces the order")
{
  const auto geo = LaneGeometry::standard_four_way();
  const auto ctx = context(geo);
  std::vector<CoordVehicle> pool{make(3, 11, -45, 6), make(1, 11, -10, 6), make(2, 11, -25, 6)};
  const std::vector<VehicleId> expect{1, 2, 3};
  CHECK(ddswa_round(pool, {}, ctx).order == expect);
  CHECK(fifo_round(pool, {}, ctx).order == expect);
  CHECK(combined_round(pool, {}, ctx).order == expect);
}

TEST_CASE("randomized rounds: safety, scale invariance, bounds against combined")
{
  const auto geo = LaneGeometry::standard_four_way();
  auto ctx = context(geo);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    CAPTURE(trial);
    const auto draw = testing::random_batch(rng, 1 + trial % 4, ctx.t_coord, 6.0);
    const auto d = ddswa_round(draw.pool, draw.scheduled, ctx);
    CHECK(d.steps.size() == draw.pool.size());
    check_schedule_safe(d, geo);
    for (double lambda : {0.1, 10.0}) {
      auto scaled = ctx;
      scaled.scheduling = ctx.scheduling.scaled(lambda);
      CHECK(ddswa_round(draw.pool, draw.scheduled, scaled).order == d.order);
    }
    const auto c = combined_round(draw.pool, draw.scheduled, ctx);
    if (c.held.empty() && d.held.empty()) {
      CHECK(d.total_objective <= c.total_objective + 1e-4 * std::abs(c.total_objective));
    }
  }
}

TEST_CASE("followers of a held vehicle are held")
{
  const auto geo = LaneGeometry::standard_four_way();
  auto ctx = context(geo);
  ctx.horizon = 5.0;
  std::vector<CoordVehicle> pool{make(1, 2, -50.0, 0.0), make(2, 2, -58.0, 0.0)};
  const auto r = ddswa_round(pool, {}, ctx);
  CHECK(r.order.empty());
  CHECK(r.held == std::vector<VehicleId>{1, 2});
  const auto & lead = r.plans.at(1).trajectory;
  const auto & tail = r.plans.at(2).trajectory;
  CHECK(rear_end_ok(tail, lead, 4.3, 0.2, -3.0, 1e-6).ok());
  for (double x : lead.x) CHECK(x <= 0.0);
}

TEST_CASE("ddswa stays within the combined optimum on larger batches")
{
  const auto geo = LaneGeometry::standard_four_way();
  const auto ctx = context(geo);
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 4; ++trial) {
    CAPTURE(trial);
    const auto draw = testing::random_batch(rng, 5 + trial % 2, ctx.t_coord, 4.0);
    const auto d = ddswa_round(draw.pool, draw.scheduled, ctx);
    const auto c = combined_round(draw.pool, draw.scheduled, ctx);
    check_schedule_safe(d, geo);
    check_schedule_safe(c, geo);
    CHECK(d.steps.size() == draw.pool.size());
    if (c.held.empty() && d.held.empty()) {
      CHECK(d.total_objective <= c.total_objective + 1e-4 * std::abs(c.total_objective));
    }
  }
}
