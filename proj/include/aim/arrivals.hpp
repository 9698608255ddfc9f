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
#include "aim/ocp.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

namespace aim
{

/// Generator for one lane, seeded from (master seed, lane id).
std::mt19937_64 lane_generator(std::uint64_t seed, LaneId lane);

/// Exponential inter-arrival time with mean 1 / sigma.
double next_arrival(std::mt19937_64 & rng, double sigma);

/// Requested arrival times of one lane, in increasing order.
class ArrivalStream
{
public:
  ArrivalStream(std::uint64_t seed, LaneId lane, double sigma);
  /// Replays fixed request times (sorted on construction).
  ArrivalStream(LaneId lane, std::vector<double> times);

  LaneId lane() const { return lane_; }
  double sigma() const { return sigma_; }
  /// Next requested time, or nullopt for a silent lane.
  std::optional<double> peek() const;
  void pop();

private:
  LaneId lane_;
  double sigma_;
  std::mt19937_64 rng_;
  std::optional<double> next_;
  std::vector<double> script_;
  std::size_t cursor_{0};
  bool scripted_{false};
};

struct LaneArrivals
{
  std::vector<double> requested;
  std::vector<double> admitted;
  std::vector<double> delay;
};

struct ArrivalLog
{
  std::map<LaneId, LaneArrivals> lanes;

  /// Throws ContractViolation if admission precedes the request or the lane's previous admission.
  void record(LaneId lane, double requested_t, double admitted_t);
  std::size_t admitted_count() const;
};

/// Admitted count per lane divided by horizon.
std::map<LaneId, double> realized_rate(const ArrivalLog & log, double horizon);

/// CSV with header "lane,requested_t,admitted_t,delay", lanes in id order.
void write_arrivals_csv(std::ostream & os, const ArrivalLog & log);

/// min(v_max, entry-prevention cap at the lane start).
double arrival_speed(const LaneGeometry & geometry, const PhysicalParams & params);

struct Admission
{
  double admitted_t{0.0};
  double v{0.0};
};

/**
 * Earliest grid time t0 + k dt >= requested_t at which the arrival gate
 * admits against the lane tail moving along its committed trajectory
 * (extrapolated past its end). Searches up to max_wait seconds; returns
 * nullopt beyond that.
 */
std::optional<Admission> admit(
  double requested_t, double t0, double dt, const std::optional<Leader> & tail,
  const LaneGeometry & geometry, const PhysicalParams & params, double max_wait = 600.0);

}  // namespace aim
