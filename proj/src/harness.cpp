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

#include "aim/harness.hpp"

#include "aim/config.hpp"
#include "aim/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace aim
{

namespace
{

template <typename F>
std::optional<double> crossed_mean(std::span<const VehicleRecord> records, F value)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto & r : records) {
    if (!r.crossed) continue;
    sum += value(r);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> mean_of(const std::vector<double> & xs)
{
  if (xs.empty()) return std::nullopt;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

nlohmann::json opt_json(const std::optional<double> & v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

nlohmann::json box_json(const BoxStats & b)
{
  return {{"count", b.count},       {"q1", b.q1},
          {"median", b.median},     {"q3", b.q3},
          {"mean", b.mean},         {"whisker_low", b.whisker_low},
          {"whisker_high", b.whisker_high}, {"outliers", b.outliers}};
}

std::string opt_csv(const std::optional<double> & v) { return v ? fmt::format("{:.6f}", *v) : std::string(); }

}  // namespace

std::optional<double> avg_ttc(std::span<const VehicleRecord> records)
{
  return crossed_mean(records, [](const VehicleRecord & r) { return *r.t_exit - r.t_arrival; });
}

std::optional<double> avg_objective(std::span<const VehicleRecord> records)
{
  return crossed_mean(records, [](const VehicleRecord & r) { return r.objective; });
}

double quantile_sorted(std::span<const double> sorted, double p)
{
  if (sorted.empty()) throw ContractViolation("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> samples)
{
  if (samples.empty()) throw ContractViolation("box_stats: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  BoxStats b;
  b.count = s.size();
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  b.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  const double iqr = b.q3 - b.q1;
  b.whisker_high = std::min(s.back(), b.q3 + 1.5 * iqr);
  b.whisker_low = std::max(s.front(), b.q1 - 1.5 * iqr);
  for (const double x : s) {
    if (x < b.whisker_low || x > b.whisker_high) b.outliers.push_back(x);
  }
  return b;
}

std::map<LaneId, double> lane_rates_for(RatePattern pattern, double sigma, const LaneGeometry & geometry)
{
  auto rates = uniform_rates(geometry, sigma);
  if (pattern == RatePattern::Inhomogeneous) {
    for (const LaneId lane : {5, 11}) {
      if (rates.count(lane)) rates[lane] = sigma / 2.0;
    }
  }
  return rates;
}

void ComparisonSpec::validate() const
{
  if (algorithms.empty()) throw ConfigError("comparison needs at least one algorithm");
  if (sigmas.empty()) throw ConfigError("comparison needs at least one arrival rate");
  if (trials == 0) throw ConfigError("comparison needs at least one trial");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw ConfigError("arrival rates must be positive");
  }
}

std::optional<double> CellSummary::mean_ttc() const
{
  std::vector<double> xs;
  for (const auto & t : trials) {
    if (t.avg_ttc) xs.push_back(*t.avg_ttc);
  }
  return mean_of(xs);
}

std::optional<double> CellSummary::mean_objective() const
{
  std::vector<double> xs;
  for (const auto & t : trials) {
    if (t.avg_objective) xs.push_back(*t.avg_objective);
  }
  return mean_of(xs);
}

std::optional<double> CellSummary::mean_realized_rate() const
{
  std::vector<double> xs;
  for (const auto & t : trials) xs.push_back(t.realized_rate);
  return mean_of(xs);
}

std::optional<double> CellSummary::median_compute_ms() const
{
  std::vector<double> xs;
  for (const auto & t : trials) {
    if (t.compute_ms_per_vehicle) xs.push_back(*t.compute_ms_per_vehicle);
  }
  if (xs.empty()) return std::nullopt;
  std::sort(xs.begin(), xs.end());
  return quantile_sorted(xs, 0.5);
}

std::size_t CellSummary::safety_violations() const
{
  std::size_t n = 0;
  for (const auto & t : trials) {
    n += t.safety.rear_end_violations + t.safety.overlap_violations + t.safety.envelope_violations +
         t.safety.bound_violations;
  }
  return n;
}

const CellSummary * ComparisonReport::find(Algorithm algorithm, double sigma) const
{
  for (const auto & c : cells) {
    if (c.algorithm == algorithm && std::abs(c.sigma - sigma) < 1e-12) return &c;
  }
  return nullptr;
}

RunConfig trial_config(const ComparisonSpec & spec, Algorithm algorithm, double sigma, std::size_t trial)
{
  RunConfig c = spec.base;
  c.algorithm = algorithm;
  c.lane_rates = lane_rates_for(spec.pattern, sigma, c.geometry);
  if (spec.profile) {
    c.scheduling = scheduling_profile(*spec.profile);
    c.weights = objective_profile(*spec.profile);
  }
  c.seed = spec.base.seed + trial;
  c.abort_on_violation = false;
  c.keep_traces = false;
  return c;
}

TrialSummary summarize(const RunResult & result, std::uint64_t seed)
{
  TrialSummary t;
  t.seed = seed;
  t.duration = result.duration;
  t.admitted = result.vehicles.size();
  for (const auto & v : result.vehicles) t.crossed += v.crossed ? 1 : 0;
  t.avg_ttc = avg_ttc(result.vehicles);
  t.avg_objective = avg_objective(result.vehicles);
  t.realized_by_lane = realized_rate(result.arrivals, result.duration);
  double sum = 0.0;
  for (const auto & [lane, r] : t.realized_by_lane) sum += r;
  t.realized_rate = t.realized_by_lane.empty() ? 0.0 : sum / static_cast<double>(t.realized_by_lane.size());
  for (const auto & r : result.rounds) {
    if (r.pool > 0) t.pool_sizes.push_back(r.pool);
  }
  t.compute_ms_per_vehicle = result.compute_ms_per_vehicle();
  t.safety = result.safety;
  return t;
}

ComparisonReport run_comparison(
  const ComparisonSpec & spec, const std::function<void(const CellSummary &)> & on_cell)
{
  spec.validate();
  ComparisonReport report;
  report.spec = spec;
  for (const Algorithm algorithm : spec.algorithms) {
    for (const double sigma : spec.sigmas) {
      CellSummary cell;
      cell.algorithm = algorithm;
      cell.sigma = sigma;
      try {
        for (std::size_t trial = 0; trial < spec.trials; ++trial) {
          const auto config = trial_config(spec, algorithm, sigma, trial);
          cell.trials.push_back(summarize(run(config), config.seed));
        }
      } catch (const BatchTooLarge & e) {
        cell.refused = true;
        cell.refusal = e.what();
        cell.trials.clear();
      } catch (const OversaturationError & e) {
        cell.refused = true;
        cell.refusal = e.what();
        cell.trials.clear();
      }
      if (on_cell) on_cell(cell);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

nlohmann::json report_json(const ComparisonReport & report)
{
  const auto & spec = report.spec;
  nlohmann::json j;
  j["name"] = spec.name;
  j["quantile_convention"] = "linear interpolation of order statistics at positions p*(n-1), zero-indexed";
  j["trials"] = spec.trials;
  j["pattern"] = spec.pattern == RatePattern::Homogeneous ? "homogeneous" : "inhomogeneous";
  std::vector<std::string> algos;
  for (auto a : spec.algorithms) algos.emplace_back(to_string(a));
  j["algorithms"] = algos;
  j["sigmas"] = spec.sigmas;
  auto base = spec.algorithms.empty() || spec.sigmas.empty()
                ? spec.base
                : trial_config(spec, spec.algorithms.front(), spec.sigmas.front(), 0);
  j["config"] = to_json(base);
  j["cells"] = nlohmann::json::array();
  for (const auto & c : report.cells) {
    nlohmann::json cell;
    cell["algorithm"] = std::string(to_string(c.algorithm));
    cell["sigma"] = c.sigma;
    cell["refused"] = c.refused;
    if (c.refused) {
      cell["refusal"] = c.refusal;
      j["cells"].push_back(cell);
      continue;
    }
    std::vector<double> ttcs, objs, pools;
    nlohmann::json trials = nlohmann::json::array();
    for (const auto & t : c.trials) {
      if (t.avg_ttc) ttcs.push_back(*t.avg_ttc);
      if (t.avg_objective) objs.push_back(*t.avg_objective);
      for (auto p : t.pool_sizes) pools.push_back(static_cast<double>(p));
      trials.push_back({
        {"seed", t.seed},
        {"duration", t.duration},
        {"admitted", t.admitted},
        {"crossed", t.crossed},
        {"avg_ttc", opt_json(t.avg_ttc)},
        {"avg_objective", opt_json(t.avg_objective)},
        {"realized_rate", t.realized_rate},
        {"rear_end_violations", t.safety.rear_end_violations},
        {"overlap_violations", t.safety.overlap_violations},
        {"envelope_violations", t.safety.envelope_violations},
        {"bound_violations", t.safety.bound_violations},
      });
    }
    cell["mean_ttc"] = opt_json(c.mean_ttc());
    cell["mean_objective"] = opt_json(c.mean_objective());
    cell["mean_realized_rate"] = opt_json(c.mean_realized_rate());
    cell["safety_violations"] = c.safety_violations();
    if (!ttcs.empty()) cell["ttc_box"] = box_json(box_stats(ttcs));
    if (!objs.empty()) cell["objective_box"] = box_json(box_stats(objs));
    if (!pools.empty()) cell["pool_box"] = box_json(box_stats(pools));
    cell["trials"] = trials;
    j["cells"].push_back(cell);
  }
  return j;
}

nlohmann::json timing_json(const ComparisonReport & report)
{
  nlohmann::json j = nlohmann::json::array();
  for (const auto & c : report.cells) {
    if (c.refused) continue;
    std::vector<double> ms;
    for (const auto & t : c.trials) {
      if (t.compute_ms_per_vehicle) ms.push_back(*t.compute_ms_per_vehicle);
    }
    nlohmann::json cell;
    cell["algorithm"] = std::string(to_string(c.algorithm));
    cell["sigma"] = c.sigma;
    cell["median_ms_per_vehicle"] = opt_json(c.median_compute_ms());
    if (!ms.empty()) cell["ms_per_vehicle_box"] = box_json(box_stats(ms));
    j.push_back(cell);
  }
  return j;
}

void write_report(const std::filesystem::path & dir, const ComparisonReport & report)
{
  std::filesystem::create_directories(dir / "figs");
  const auto j = report_json(report);
  std::ofstream(dir / "report.json") << j.dump(2) << '\n';
  std::ofstream(dir / "timing.json") << timing_json(report).dump(2) << '\n';

  const auto box_row = [](const nlohmann::json & cell, const char * key) {
    if (!cell.contains(key)) return std::string(",,,,,,");
    const auto & b = cell[key];
    return fmt::format(
      "{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}", b["mean"].get<double>(), b["q1"].get<double>(),
      b["median"].get<double>(), b["q3"].get<double>(), b["whisker_low"].get<double>(),
      b["whisker_high"].get<double>(), b["outliers"].size());
  };
  const char * header = "algorithm,sigma,mean,q1,median,q3,whisker_low,whisker_high,outliers\n";
  for (const auto & [file, key] : {std::pair{"ttc.csv", "ttc_box"}, std::pair{"objective.csv", "objective_box"},
                                   std::pair{"pool.csv", "pool_box"}}) {
    std::ofstream os(dir / "figs" / file);
    os << header;
    for (const auto & cell : j["cells"]) {
      if (cell["refused"].get<bool>()) continue;
      os << fmt::format("{},{},{}\n", cell["algorithm"].get<std::string>(), cell["sigma"].get<double>(), box_row(cell, key));
    }
  }
  {
    std::ofstream os(dir / "figs" / "realized.csv");
    os << "algorithm,sigma,requested_mean,realized_mean\n";
    for (const auto & c : report.cells) {
      if (c.refused) continue;
      double requested = 0.0;
      const auto rates = lane_rates_for(report.spec.pattern, c.sigma, report.spec.base.geometry);
      for (const auto & [lane, r] : rates) requested += r / static_cast<double>(rates.size());
      os << fmt::format("{},{},{:.6f},{}\n", to_string(c.algorithm), c.sigma, requested, opt_csv(c.mean_realized_rate()));
    }
  }
  {
    std::ofstream os(dir / "figs" / "compute.csv");
    os << "algorithm,sigma,median_ms_per_vehicle\n";
    for (const auto & c : report.cells) {
      if (c.refused) continue;
      os << fmt::format("{},{},{}\n", to_string(c.algorithm), c.sigma, opt_csv(c.median_compute_ms()));
    }
  }
}

}  // namespace aim
