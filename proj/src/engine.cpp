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

#include "aim/engine.hpp"

#include "aim/config.hpp"
#include "aim/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

namespace aim
{

std::string_view to_string(Algorithm algorithm)
{
  switch (algorithm) {
    case Algorithm::DdSwa:
      return "ddswa";
    case Algorithm::Combined:
      return "combined";
    case Algorithm::Fifo:
      return "fifo";
    case Algorithm::Signal:
      return "signal";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name)
{
  for (auto a : {Algorithm::DdSwa, Algorithm::Combined, Algorithm::Fifo, Algorithm::Signal}) {
    if (name == to_string(a)) return a;
  }
  throw ConfigError(fmt::format("unknown algorithm '{}'", name));
}

namespace
{

bool on_grid(double value, double dt)
{
  const double q = value / dt;
  return std::abs(q - std::round(q)) < 1e-9 * std::max(1.0, std::abs(q));
}

long steps_of(double value, double dt) { return std::lround(value / dt); }

}  // namespace

double RunConfig::saturation_flow() const
{
  return sat_flow.value_or(params.v_max / (params.vehicle_length + params.robustness));
}

void RunConfig::validate() const
{
  params.validate();
  scheduling.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_coop > 0.0)) throw ConfigError("t_coop must be positive");
  if (t_c < t_coop) throw ConfigError("t_c must be at least t_coop");
  if (!(t_h > 0.0)) throw ConfigError("t_h must be positive");
  if (!on_grid(t_coop, dt) || !on_grid(t_c, dt)) throw ConfigError("t_coop and t_c must be multiples of dt");
  if (duration && !(*duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(saturation_flow() > 0.0)) throw ConfigError("saturation flow must be positive");
  if (!(lost_per_phase >= 0.0)) throw ConfigError("lost time must be nonnegative");
  if (max_batch == 0) throw ConfigError("max_batch must be positive");
  if (weights.velocity < 0.0 || weights.accel < 0.0 || weights.jerk < 0.0) {
    throw ConfigError("objective weights must be nonnegative");
  }
  for (const auto & [lane, times] : scripted_arrivals) {
    if (!geometry.has_lane(lane)) throw ConfigError(fmt::format("arrivals given for unknown lane {}", lane));
    for (double t : times) {
      if (!(t >= 0.0)) throw ConfigError("scripted arrival times must be nonnegative");
    }
  }
  for (const auto & [lane, rate] : lane_rates) {
    if (!geometry.has_lane(lane)) throw ConfigError(fmt::format("rate given for unknown lane {}", lane));
    if (!(rate >= 0.0)) throw ConfigError("lane rates must be nonnegative");
  }
}

std::map<LaneId, double> uniform_rates(const LaneGeometry & geometry, double sigma)
{
  std::map<LaneId, double> out;
  for (const LaneId lane : geometry.lanes()) out[lane] = sigma;
  return out;
}

double assign_tC(double t_arrival, double t_coop)
{
  if (t_arrival < 0.0) throw ContractViolation("assign_tC: negative arrival time");
  if (!(t_coop > 0.0)) throw ContractViolation("assign_tC: t_coop must be positive");
  return std::ceil(t_arrival / t_coop - 1e-9) * t_coop;
}

SignalPlan signal_plan(const RunConfig & config)
{
  return webster_timing(
    config.lane_rates, config.saturation_flow(), config.lost_per_phase, greedy_phases(config.geometry));
}

double run_duration(const RunConfig & config)
{
  if (config.duration) return *config.duration;
  return signal_duration(signal_plan(config));
}

std::optional<double> VehicleRecord::ttc() const
{
  if (!crossed || !t_exit) return std::nullopt;
  return *t_exit - t_arrival;
}

std::optional<double> RunResult::compute_ms_per_vehicle() const
{
  double wall = 0.0;
  std::size_t pool = 0;
  for (const auto & r : rounds) {
    wall += r.wall_ms;
    pool += r.pool;
  }
  if (pool == 0) return std::nullopt;
  return wall / static_cast<double>(pool);
}

CommCounts comm_trace(const RoundResult & round) { return round.comm; }

namespace
{

struct SimVehicle
{
  VehicleId id{0};
  LaneId lane{0};
  double length{4.3};
  double t_arrival{0.0};
  long k_arrival{0};
  long k_coord{0};
  SampledTrajectory traj;
  std::optional<ScheduleEntry> entry;
  std::size_t holds{0};
  std::optional<std::size_t> pred;
};

class Simulation
{
public:
  explicit Simulation(const RunConfig & config) : cfg_(config)
  {
    cfg_.validate();
    if (cfg_.algorithm == Algorithm::Signal || !cfg_.duration) plan_ = signal_plan(cfg_);
    duration_ = cfg_.duration ? *cfg_.duration : signal_duration(*plan_);
    k_end_ = static_cast<long>(std::ceil(duration_ / cfg_.dt - 1e-9));
    k_coop_ = steps_of(cfg_.t_coop, cfg_.dt);
    v_arrival_ = arrival_speed(cfg_.geometry, cfg_.params);
    for (const LaneId lane : sorted_lanes()) {
      const auto script = cfg_.scripted_arrivals.find(lane);
      if (script != cfg_.scripted_arrivals.end()) {
        streams_.emplace_back(lane, script->second);
      } else {
        const auto it = cfg_.lane_rates.find(lane);
        streams_.emplace_back(cfg_.seed, lane, it == cfg_.lane_rates.end() ? 0.0 : it->second);
      }
      result_.arrivals.lanes[lane];
    }
  }

  RunResult run()
  {
    for (long k = 0; k <= k_end_; ++k) {
      admit_step(k);
      if (cfg_.algorithm == Algorithm::Signal) {
        signal_step_at(k);
      } else if (k % k_coop_ == 0) {
        coordinate(k, std::nullopt, std::nullopt);
      }
    }
    finish();
    return std::move(result_);
  }

private:
  double time(long k) const { return static_cast<double>(k) * cfg_.dt; }

  std::vector<LaneId> sorted_lanes() const
  {
    auto lanes = cfg_.geometry.lanes();
    std::sort(lanes.begin(), lanes.end());
    return lanes;
  }

  long grid_ceil(double t) const { return static_cast<long>(std::ceil(t / cfg_.dt - 1e-9)); }

  long next_coord_step(LaneId lane, long k) const
  {
    if (cfg_.algorithm != Algorithm::Signal) return (k + k_coop_ - 1) / k_coop_ * k_coop_;
    return grid_ceil(next_green(*plan_, lane, time(k)).start);
  }

  void admit_step(long k)
  {
    const double t = time(k);
    for (auto & stream : streams_) {
      while (const auto req = stream.peek()) {
        if (*req >= duration_ || *req > t + 1e-9) break;
        const LaneId lane = stream.lane();
        std::optional<LeaderState> tail;
        const auto tail_idx = lane_tail(lane);
        if (tail_idx) {
          const auto & tv = vehicles_[*tail_idx];
          const long j = tv.traj.index_of(t);
          tail = LeaderState{tv.traj.position_at(j), tv.traj.velocity_at(j), tv.length};
        }
        if (arrival_gate(v_arrival_, tail, cfg_.geometry, cfg_.params, cfg_.dt) != GateDecision::Admit) break;
        result_.arrivals.record(lane, *req, t);
        stream.pop();
        spawn(lane, k, tail_idx);
      }
    }
  }

  std::optional<std::size_t> lane_tail(LaneId lane) const
  {
    const auto it = lane_members_.find(lane);
    if (it == lane_members_.end() || it->second.empty()) return std::nullopt;
    return it->second.back();
  }

  void spawn(LaneId lane, long k, std::optional<std::size_t> pred)
  {
    SimVehicle v;
    v.id = static_cast<VehicleId>(vehicles_.size() + 1);
    v.lane = lane;
    v.length = cfg_.params.vehicle_length;
    v.t_arrival = time(k);
    v.k_arrival = k;
    v.k_coord = next_coord_step(lane, k);
    v.pred = pred;
    const double x0 = -cfg_.geometry.approach_length();
    if (v.k_coord == k) {
      v.traj = integrate(x0, v_arrival_, std::vector<double>{}, cfg_.dt, v.t_arrival);
    } else {
      OcpSpec spec;
      spec.t0 = v.t_arrival;
      spec.horizon = time(v.k_coord - k);
      spec.dt = cfg_.dt;
      spec.x0 = x0;
      spec.v0 = v_arrival_;
      spec.weights = cfg_.weights;
      spec.params = cfg_.params;
      spec.entry_prevention = true;
      spec.span = cfg_.geometry.span(lane);
      if (pred) {
        spec.leader = Leader{vehicles_[*pred].traj, vehicles_[*pred].length};
        ++result_.provisional_messages;
      }
      const auto t0 = std::chrono::steady_clock::now();
      auto sol = solve(spec, cfg_.settings);
      if (sol.status != SolveStatus::Optimal) {
        sol = hold_trajectory(spec, cfg_.settings);
        ++result_.provisional_fallbacks;
      }
      result_.provisional_ms +=
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      ++result_.provisional_solves;
      v.traj = std::move(sol.trajectory);
    }
    lane_members_[lane].push_back(vehicles_.size());
    vehicles_.push_back(std::move(v));
  }

  void signal_step_at(long k)
  {
    for (const LaneId lane : sorted_lanes()) {
      const auto window = green_at(*plan_, lane, time(k));
      if (!window || grid_ceil(window->start) != k) continue;
      coordinate(k, lane, GreenWindow{time(k), window->end});
    }
  }

  void coordinate(long k, std::optional<LaneId> lane, std::optional<GreenWindow> window)
  {
    const double t = time(k);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const auto & v = vehicles_[i];
      if (v.entry || v.k_coord != k) continue;
      if (lane && v.lane != *lane) continue;
      members.push_back(i);
    }
    if (members.empty()) return;

    std::vector<CoordVehicle> pool;
    for (const std::size_t i : members) {
      const auto & v = vehicles_[i];
      const long j = v.traj.index_of(t);
      CoordVehicle c;
      c.id = v.id;
      c.lane = v.lane;
      c.length = v.length;
      c.x = v.traj.position_at(j);
      c.v = v.traj.velocity_at(j);
      c.u_prev = j > 0 ? v.traj.accel_at(j - 1) : v.traj.u_prev;
      c.t_arrival = v.t_arrival;
      if (v.pred && std::find(members.begin(), members.end(), *v.pred) == members.end()) {
        c.external_leader = Leader{vehicles_[*v.pred].traj, vehicles_[*v.pred].length};
      }
      pool.push_back(std::move(c));
    }

    RoundContext ctx;
    ctx.geometry = &cfg_.geometry;
    ctx.t_coord = t;
    ctx.horizon = cfg_.t_c;
    ctx.dt = cfg_.dt;
    ctx.weights = cfg_.weights;
    ctx.params = cfg_.params;
    ctx.settings = cfg_.settings;
    ctx.scheduling = cfg_.scheduling;
    ctx.lane_rates = cfg_.lane_rates;
    if (window) {
      const double next = next_green(*plan_, *lane, window->end).start;
      ctx.hold_horizon = time(grid_ceil(next - t)) + cfg_.t_coop;
    }

    scheduled_ = prune_scheduled(scheduled_, t);
    const auto t0 = std::chrono::steady_clock::now();
    RoundResult r;
    switch (cfg_.algorithm) {
      case Algorithm::DdSwa:
        r = ddswa_round(pool, scheduled_, ctx);
        break;
      case Algorithm::Fifo:
        r = fifo_round(pool, scheduled_, ctx);
        break;
      case Algorithm::Combined:
        r = combined_round(pool, scheduled_, ctx, cfg_.max_batch);
        break;
      case Algorithm::Signal:
        r = green_dispatch(pool, *window, scheduled_, ctx);
        break;
    }
    const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    for (const std::size_t i : members) {
      auto & v = vehicles_[i];
      const auto & plan = r.plans.at(v.id);
      v.traj = splice(v.traj, plan.trajectory);
    }
    for (const auto & e : r.scheduled) {
      const auto it = std::find(r.order.begin(), r.order.end(), e.vehicle);
      if (it == r.order.end()) continue;
      vehicles_[static_cast<std::size_t>(e.vehicle - 1)].entry = e;
      result_.schedule.push_back(e);
    }
    for (const VehicleId id : r.held) {
      auto & v = vehicles_[static_cast<std::size_t>(id - 1)];
      ++v.holds;
      v.k_coord = window ? grid_ceil(next_green(*plan_, v.lane, window->end).start) : k + k_coop_;
    }
    scheduled_ = r.scheduled;

    RoundRecord rec;
    rec.index = result_.rounds.size();
    rec.t = t;
    rec.lane = lane.value_or(0);
    rec.pool = pool.size();
    rec.held = r.held.size();
    rec.orders_enumerated = r.orders_enumerated;
    rec.comm = comm_trace(r);
    rec.wall_ms = wall;
    result_.rounds.push_back(rec);
    if (cfg_.keep_traces) result_.traces.push_back(std::move(r));
  }

  void finish()
  {
    result_.duration = duration_;
    result_.signal = plan_;
    for (auto & v : vehicles_) {
      VehicleRecord rec;
      rec.id = v.id;
      rec.lane = v.lane;
      rec.t_arrival = v.t_arrival;
      rec.t_coord = time(v.k_coord);
      rec.holds = v.holds;
      if (v.entry) {
        rec.t_entry = v.entry->entry;
        rec.t_exit = v.entry->exit;
        rec.crossed = v.entry->exit <= duration_ + 1e-9;
      }
      rec.objective = vehicle_objective(v.traj, cfg_.weights, v.t_arrival, cfg_.t_h);
      result_.vehicles.push_back(rec);
      result_.trajectories.emplace(v.id, std::move(v.traj));
    }
    result_.safety = safety_sweep(cfg_, result_);
    if (cfg_.abort_on_violation && !result_.safety.ok()) {
      throw SafetyViolation(fmt::format(
        "post-hoc sweep: {} rear-end, {} overlap, {} envelope, {} bound violations (worst margin {:.3e} m)",
        result_.safety.rear_end_violations, result_.safety.overlap_violations,
        result_.safety.envelope_violations, result_.safety.bound_violations,
        result_.safety.worst_rear_end_margin));
    }
  }

  RunConfig cfg_;
  std::optional<SignalPlan> plan_;
  double duration_{0.0};
  long k_end_{0};
  long k_coop_{1};
  double v_arrival_{0.0};
  std::vector<ArrivalStream> streams_;
  std::vector<SimVehicle> vehicles_;
  std::map<LaneId, std::vector<std::size_t>> lane_members_;
  ScheduledSet scheduled_;
  RunResult result_;
};

}  // namespace

RunResult run(const RunConfig & config) { return Simulation(config).run(); }

SafetyReport safety_sweep(const RunConfig & config, const RunResult & result)
{
  constexpr double tol = 1e-6;
  SafetyReport report;
  const double dt = config.dt;
  const long k_end = static_cast<long>(std::ceil(result.duration / dt - 1e-9));

  std::map<LaneId, std::vector<const VehicleRecord *>> lanes;
  for (const auto & v : result.vehicles) lanes[v.lane].push_back(&v);

  const auto executed = [&](const VehicleRecord & v) {
    const auto & traj = result.trajectories.at(v.id);
    const long k0 = std::lround(v.t_arrival / dt);
    return window(traj, v.t_arrival, static_cast<std::size_t>(std::max(0L, k_end - k0)));
  };

  for (const auto & [lane, members] : lanes) {
    const double span = config.geometry.span(lane);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto & v = *members[i];
      const auto traj = executed(v);
      if (i > 0) {
        const auto & lead = result.trajectories.at(members[i - 1]->id);
        const auto rep = rear_end_ok(
          traj, lead, config.params.vehicle_length, config.params.robustness, config.params.u_min,
          tol, span);
        ++report.rear_end_pairs_checked;
        report.rear_end_violations += rep.violations.size();
        report.worst_rear_end_margin = std::min(report.worst_rear_end_margin, rep.min_margin);
      }
      // Entry prevention holds until the vehicle's last coordination instant.
      const long k_hold = std::lround((v.t_coord - v.t_arrival) / dt);
      const auto upstream = window(traj, traj.t0, static_cast<std::size_t>(std::clamp(k_hold, 0L, static_cast<long>(traj.steps()))));
      report.envelope_violations += envelope_violations(upstream, config.params.u_min, tol).size();
      for (const double x : upstream.x) {
        if (x > tol) ++report.envelope_violations;
      }
      report.bound_violations += check_bounds(traj, config.params, tol).size();
    }
  }

  const auto & s = result.schedule;
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      if (!config.geometry.incompatible(s[a].lane, s[b].lane)) continue;
      ++report.overlap_pairs_checked;
      const double sep = std::max(s[a].entry - s[b].exit, s[b].entry - s[a].exit);
      report.worst_overlap_separation = std::min(report.worst_overlap_separation, sep);
      if (!intersection_overlap_ok(s[a].entry, s[a].exit, s[b].entry, s[b].exit, tol)) {
        ++report.overlap_violations;
      }
    }
  }
  return report;
}

void write_run_outputs(
  const std::filesystem::path & dir, const RunConfig & config, const RunResult & result)
{
  std::filesystem::create_directories(dir);
  const auto opt = [](const std::optional<double> & v) {
    return v ? fmt::format("{:.6f}", *v) : std::string();
  };
  {
    std::ofstream os(dir / "vehicles.csv");
    os << "id,lane,t_A,t_C,t_E,t_X,ttc,objective,crossed\n";
    for (const auto & v : result.vehicles) {
      os << fmt::format(
        "{},{},{:.6f},{:.6f},{},{},{},{:.6f},{}\n", v.id, v.lane, v.t_arrival, v.t_coord,
        opt(v.t_entry), opt(v.t_exit), opt(v.ttc()), v.objective, v.crossed ? 1 : 0);
    }
  }
  {
    std::ofstream os(dir / "rounds.csv");
    os << "k,t,lane,pool,held,orders,central,intra_lane,inter_lane\n";
    for (const auto & r : result.rounds) {
      os << fmt::format(
        "{},{:.6f},{},{},{},{},{},{},{}\n", r.index, r.t, r.lane, r.pool, r.held, r.orders_enumerated,
        r.comm.central, r.comm.intra_lane, r.comm.inter_lane);
    }
  }
  {
    std::ofstream os(dir / "timing.csv");
    os << "k,pool,wall_ms\n";
    for (const auto & r : result.rounds) os << fmt::format("{},{},{:.6f}\n", r.index, r.pool, r.wall_ms);
  }
  {
    std::ofstream os(dir / "arrivals.csv");
    write_arrivals_csv(os, result.arrivals);
  }
  {
    const auto & s = result.safety;
    nlohmann::json j;
    j["ok"] = s.ok();
    j["rear_end_pairs_checked"] = s.rear_end_pairs_checked;
    j["rear_end_violations"] = s.rear_end_violations;
    j["worst_rear_end_margin"] =
      std::isfinite(s.worst_rear_end_margin) ? nlohmann::json(s.worst_rear_end_margin) : nlohmann::json();
    j["overlap_pairs_checked"] = s.overlap_pairs_checked;
    j["overlap_violations"] = s.overlap_violations;
    j["worst_overlap_separation"] = std::isfinite(s.worst_overlap_separation)
                                      ? nlohmann::json(s.worst_overlap_separation)
                                      : nlohmann::json();
    j["envelope_violations"] = s.envelope_violations;
    j["bound_violations"] = s.bound_violations;
    j["provisional_fallbacks"] = result.provisional_fallbacks;
    if (result.signal) j["signal_plan"] = to_json(*result.signal);
    std::ofstream(dir / "safety.json") << j.dump(2) << '\n';
  }
  std::ofstream(dir / "config.json") << to_json(config).dump(2) << '\n';
}

}  // namespace aim
