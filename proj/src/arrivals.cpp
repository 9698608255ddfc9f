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

#include "aim/arrivals.hpp"

#include "aim/errors.hpp"
#include "aim/safety.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace aim
{

std::mt19937_64 lane_generator(std::uint64_t seed, LaneId lane)
{
  std::seed_seq seq{
    static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
    static_cast<std::uint32_t>(lane)};
  return std::mt19937_64(seq);
}

double next_arrival(std::mt19937_64 & rng, double sigma)
{
  if (!(sigma > 0.0)) throw ContractViolation("next_arrival: sigma must be positive");
  return std::exponential_distribution<double>(sigma)(rng);
}

ArrivalStream::ArrivalStream(std::uint64_t seed, LaneId lane, double sigma)
: lane_(lane), sigma_(sigma), rng_(lane_generator(seed, lane))
{
  if (sigma < 0.0) throw ConfigError("arrival rate must be nonnegative");
  if (sigma > 0.0) next_ = next_arrival(rng_, sigma_);
}

ArrivalStream::ArrivalStream(LaneId lane, std::vector<double> times)
: lane_(lane), sigma_(0.0), script_(std::move(times)), scripted_(true)
{
  std::sort(script_.begin(), script_.end());
  if (!script_.empty()) next_ = script_.front();
}

std::optional<double> ArrivalStream::peek() const { return next_; }

void ArrivalStream::pop()
{
  if (!next_) return;
  if (scripted_) {
    ++cursor_;
    next_ = cursor_ < script_.size() ? std::optional<double>(script_[cursor_]) : std::nullopt;
    return;
  }
  next_ = *next_ + next_arrival(rng_, sigma_);
}

void ArrivalLog::record(LaneId lane, double requested_t, double admitted_t)
{
  auto & l = lanes[lane];
  if (admitted_t < requested_t - 1e-9) throw ContractViolation("admission before request");
  if (!l.admitted.empty() && !(admitted_t > l.admitted.back())) {
    throw ContractViolation("admissions on a lane must be strictly increasing");
  }
  l.requested.push_back(requested_t);
  l.admitted.push_back(admitted_t);
  l.delay.push_back(std::max(0.0, admitted_t - requested_t));
}

std::size_t ArrivalLog::admitted_count() const
{
  std::size_t n = 0;
  for (const auto & [lane, l] : lanes) n += l.admitted.size();
  return n;
}

std::map<LaneId, double> realized_rate(const ArrivalLog & log, double horizon)
{
  if (!(horizon > 0.0)) throw ContractViolation("realized_rate: horizon must be positive");
  std::map<LaneId, double> out;
  for (const auto & [lane, l] : log.lanes) out[lane] = static_cast<double>(l.admitted.size()) / horizon;
  return out;
}

void write_arrivals_csv(std::ostream & os, const ArrivalLog & log)
{
  os << "lane,requested_t,admitted_t,delay\n";
  for (const auto & [lane, l] : log.lanes) {
    for (std::size_t i = 0; i < l.admitted.size(); ++i) {
      os << fmt::format("{},{:.6f},{:.6f},{:.6f}\n", lane, l.requested[i], l.admitted[i], l.delay[i]);
    }
  }
}

double arrival_speed(const LaneGeometry & geometry, const PhysicalParams & params)
{
  return std::min(params.v_max, entry_prevention_cap(-geometry.approach_length(), params.u_min));
}

std::optional<Admission> admit(
  double requested_t, double t0, double dt, const std::optional<Leader> & tail,
  const LaneGeometry & geometry, const PhysicalParams & params, double max_wait)
{
  if (!(dt > 0.0)) throw ContractViolation("admit: dt must be positive");
  const double v = arrival_speed(geometry, params);
  long k = static_cast<long>(std::ceil((requested_t - t0) / dt - 1e-9));
  k = std::max(k, 0L);
  const long k_last = static_cast<long>(std::floor((requested_t + max_wait - t0) / dt + 1e-9));
  for (; k <= k_last; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    std::optional<LeaderState> leader;
    if (tail) {
      const auto & traj = tail->trajectory;
      const long j = traj.index_of(t);
      if (j < 0) throw ContractViolation("admit: tail trajectory starts after the request");
      leader = LeaderState{traj.position_at(j), traj.velocity_at(j), tail->length};
    }
    if (arrival_gate(v, leader, geometry, params, dt) == GateDecision::Admit) return Admission{t, v};
  }
  return std::nullopt;
}

}  // namespace aim
