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

#include "aim/config.hpp"
#include "aim/engine.hpp"
#include "aim/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace aim;

namespace
{

RunConfig scripted(Algorithm algorithm, std::map<LaneId, std::vector<double>> times, double duration)
{
  RunConfig c;
  c.algorithm = algorithm;
  c.scripted_arrivals = std::move(times);
  c.duration = duration;
  c.keep_traces = true;
  return c;
}

std::string slurp(const std::filesystem::path & p)
{
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void check_executed_dynamics(const RunResult & r)
{
  for (const auto & [id, traj] : r.trajectories) {
    const auto again = integrate(traj.x.front(), traj.v.front(), traj.u, traj.dt, traj.t0, traj.u_prev);
    for (std::size_t k = 0; k < traj.x.size(); ++k) {
      REQUIRE(again.x[k] == doctest::Approx(traj.x[k]).epsilon(1e-9));
      REQUIRE(again.v[k] == doctest::Approx(traj.v[k]).epsilon(1e-9));
    }
  }
}

}  // namespace

TEST_CASE("coordination instant assignment")
{
  CHECK(assign_tC(4.2, 3.0) == doctest::Approx(6.0));
  CHECK(assign_tC(3.0, 3.0) == doctest::Approx(3.0));
  CHECK(assign_tC(0.0, 3.0) == 0.0);
  CHECK(assign_tC(2.9999999999, 3.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(assign_tC(-1.0, 3.0), ContractViolation);
}

TEST_CASE("algorithm names")
{
  for (auto a : {Algorithm::DdSwa, Algorithm::Combined, Algorithm::Fifo, Algorithm::Signal}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK_THROWS_AS(parse_algorithm("hd"), ConfigError);
}

TEST_CASE("run configuration validation")
{
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.saturation_flow() == doctest::Approx(11.11 / 4.5));
  c.t_c = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.t_coop = 0.25;
  c.dt = 0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.lane_rates[3] = 0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.duration = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  RunConfig w;
  w.lane_rates = uniform_rates(w.geometry, 0.05);
  w.sat_flow = 0.5;
  CHECK(run_duration(w) == doctest::Approx(212.5));
}

TEST_CASE("zero arrival rate")
{
  RunConfig c;
  c.duration = 30.0;
  const auto r = run(c);
  CHECK(r.vehicles.empty());
  for (const auto & round : r.rounds) CHECK(round.pool == 0);
  CHECK(r.safety.ok());
}

TEST_CASE("single vehicle crosses")
{
  for (auto algo : {Algorithm::DdSwa, Algorithm::Fifo, Algorithm::Combined}) {
    CAPTURE(to_string(algo));
    const auto r = run(scripted(algo, {{2, {1.05}}}, 40.0));
    REQUIRE(r.vehicles.size() == 1);
    const auto & v = r.vehicles[0];
    CHECK(v.t_arrival == doctest::Approx(1.1));
    CHECK(v.t_coord == doctest::Approx(3.0));
    REQUIRE(v.crossed);
    CHECK(*v.ttc() >= 80.0 / 11.11 - 1e-9);
    CHECK(r.provisional_solves == 1);
    REQUIRE(r.traces.size() == 1);
    const auto c = comm_trace(r.traces[0]);
    CHECK(c.central == 1);
    CHECK(c.intra_lane == 0);
    CHECK(c.inter_lane == 0);
    check_executed_dynamics(r);
  }
}

TEST_CASE("two simultaneous arrivals on incompatible lanes")
{
  const auto r = run(scripted(Algorithm::DdSwa, {{2, {0.5}}, {5, {0.5}}}, 40.0));
  REQUIRE(r.schedule.size() == 2);
  const auto & a = r.schedule[0];
  const auto & b = r.schedule[1];
  CHECK(intersection_overlap_ok(a.entry, a.exit, b.entry, b.exit, 1e-6));
  CHECK(std::abs(a.entry - b.entry) > 1.0);
  CHECK(r.safety.overlap_pairs_checked == 1);
  CHECK(r.safety.ok());
  const auto & second = r.traces[0].steps[1];
  CHECK(second.tau > 0.0);
  CHECK(comm_trace(r.traces[0]).inter_lane >= 1);
}

TEST_CASE("a follower reads its predecessor")
{
  const auto r = run(scripted(Algorithm::DdSwa, {{8, {0.2, 1.5}}}, 40.0));
  REQUIRE(r.vehicles.size() == 2);
  CHECK(r.provisional_messages == 1);
  CHECK(comm_trace(r.traces[0]).intra_lane >= 1);
  CHECK(r.safety.rear_end_pairs_checked == 1);
  CHECK(r.safety.ok());
  CHECK(r.vehicles[1].t_exit > r.vehicles[0].t_exit);
}

TEST_CASE("arrivals at a coordination instant skip the provisional solve")
{
  const auto r = run(scripted(Algorithm::DdSwa, {{11, {3.0}}}, 30.0));
  REQUIRE(r.vehicles.size() == 1);
  CHECK(r.vehicles[0].t_coord == doctest::Approx(3.0));
  CHECK(r.provisional_solves == 0);
  CHECK(r.vehicles[0].crossed);
}

TEST_CASE("stochastic runs: safety, partition, continuity, determinism")
{
  for (auto algo : {Algorithm::DdSwa, Algorithm::Fifo, Algorithm::Signal}) {
    CAPTURE(to_string(algo));
    RunConfig c;
    c.algorithm = algo;
    c.lane_rates = uniform_rates(c.geometry, 0.2);
    c.duration = 90.0;
    c.seed = 17;
    c.keep_traces = true;
    const auto r = run(c);
    CHECK(r.safety.ok());
    CHECK(r.safety.rear_end_violations == 0);
    CHECK(r.safety.overlap_violations == 0);
    CHECK(!r.vehicles.empty());
    check_executed_dynamics(r);

    std::map<VehicleId, int> dispatched;
    for (const auto & t : r.traces) {
      for (VehicleId id : t.order) ++dispatched[id];
      for (const auto & [id, plan] : t.plans) {
        const auto & exec = r.trajectories.at(id);
        const long j = exec.index_of(plan.trajectory.t0);
        CHECK(exec.x[static_cast<std::size_t>(j)] == plan.trajectory.x[0]);
        CHECK(exec.v[static_cast<std::size_t>(j)] == plan.trajectory.v[0]);
      }
    }
    for (const auto & [id, n] : dispatched) CHECK(n == 1);
    for (const auto & v : r.vehicles) {
      if (v.crossed) CHECK(dispatched.count(v.id) == 1);
    }

    const auto again = run(c);
    REQUIRE(again.vehicles.size() == r.vehicles.size());
    for (std::size_t i = 0; i < r.vehicles.size(); ++i) {
      CHECK(again.vehicles[i].t_exit == r.vehicles[i].t_exit);
      CHECK(again.vehicles[i].objective == r.vehicles[i].objective);
    }
  }
}

TEST_CASE("combined refuses oversized batches")
{
  RunConfig c;
  c.algorithm = Algorithm::Combined;
  c.lane_rates = uniform_rates(c.geometry, 0.6);
  c.duration = 60.0;
  c.max_batch = 1;
  CHECK_THROWS_AS(run(c), BatchTooLarge);
}

TEST_CASE("signal mode dispatches only at green onset")
{
  RunConfig c = scripted(Algorithm::Signal, {{2, {0.5}}, {5, {0.5}}, {8, {}}, {11, {}}}, 80.0);
  c.lane_rates = uniform_rates(c.geometry, 0.05);
  c.sat_flow = 0.5;
  const auto r = run(c);
  REQUIRE(r.signal);
  REQUIRE(r.vehicles.size() == 2);
  for (const auto & v : r.vehicles) {
    const auto w = next_green(*r.signal, v.lane, v.t_arrival);
    CHECK(v.t_coord == doctest::Approx(std::ceil(w.start / 0.1 - 1e-9) * 0.1));
    REQUIRE(v.crossed);
    CHECK(*v.t_entry >= v.t_coord - 1e-9);
    CHECK(*v.t_exit <= w.end + 1e-6);
  }
  CHECK(r.safety.ok());
}

TEST_CASE("run outputs")
{
  RunConfig c;
  c.lane_rates = uniform_rates(c.geometry, 0.1);
  c.duration = 30.0;
  const auto r = run(c);
  const auto dir = std::filesystem::temp_directory_path() / "aim_engine_outputs";
  std::filesystem::remove_all(dir);
  write_run_outputs(dir, c, r);
  for (const char * f : {"vehicles.csv", "rounds.csv", "timing.csv", "arrivals.csv", "safety.json", "config.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(slurp(dir / "vehicles.csv").rfind("id,lane,t_A,t_C,t_E,t_X,ttc,objective,crossed\n", 0) == 0);
  const auto safety = nlohmann::json::parse(slurp(dir / "safety.json"));
  CHECK(safety["ok"] == true);
  const auto echo = nlohmann::json::parse(slurp(dir / "config.json"));
  CHECK(echo["algorithm"] == "ddswa");
  CHECK(echo["lane_rates"]["5"] == 0.1);

  const auto dir2 = dir / "again";
  write_run_outputs(dir2, c, run(c));
  for (const char * f : {"vehicles.csv", "rounds.csv", "arrivals.csv", "safety.json", "config.json"}) {
    CHECK(slurp(dir / f) == slurp(dir2 / f));
  }
  std::filesystem::remove_all(dir);
}
