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
#include "aim/engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aim
{

/// Mean of t_X - t_A over crossed vehicles; nullopt when none crossed.
std::optional<double> avg_ttc(std::span<const VehicleRecord> records);

/// Mean objective over crossed vehicles; nullopt when none crossed.
std::optional<double> avg_objective(std::span<const VehicleRecord> records);

/**
 * Box-plot statistics. Quartiles interpolate linearly between order
 * statistics at zero-based positions p (n - 1); whiskers are the
 * sample extremes clipped to 1.5 IQR beyond the box.
 */
struct BoxStats
{
  double q1{0.0};
  double median{0.0};
  double q3{0.0};
  double mean{0.0};
  double whisker_low{0.0};
  double whisker_high{0.0};
  std::vector<double> outliers;
  std::size_t count{0};
};

/// Linear-interpolation quantile of already sorted samples.
double quantile_sorted(std::span<const double> sorted, double p);

/// Throws ContractViolation on empty input.
BoxStats box_stats(std::span<const double> samples);

enum class RatePattern { Homogeneous, Inhomogeneous };

/// Homogeneous: sigma everywhere. Inhomogeneous: sigma on lanes 2 and 8, sigma / 2 on 5 and 11.
std::map<LaneId, double> lane_rates_for(RatePattern pattern, double sigma, const LaneGeometry & geometry);

struct ComparisonSpec
{
  std::string name{"comparison"};
  std::vector<Algorithm> algorithms;
  std::vector<double> sigmas;
  RatePattern pattern{RatePattern::Homogeneous};
  std::size_t trials{20};
  /// Overrides the base scheduling and objective weights when set.
  std::optional<WeightProfile> profile;
  /// Rates, algorithm and seed are overwritten per cell and trial.
  RunConfig base;

  /// Throws ConfigError.
  void validate() const;
};

struct TrialSummary
{
  std::uint64_t seed{0};
  double duration{0.0};
  std::size_t admitted{0};
  std::size_t crossed{0};
  std::optional<double> avg_ttc;
  std::optional<double> avg_objective;
  /// Mean over lanes of admitted / duration.
  double realized_rate{0.0};
  std::map<LaneId, double> realized_by_lane;
  std::vector<std::size_t> pool_sizes;
  std::optional<double> compute_ms_per_vehicle;
  SafetyReport safety;
};

struct CellSummary
{
  Algorithm algorithm{Algorithm::DdSwa};
  double sigma{0.0};
  bool refused{false};
  std::string refusal;
  std::vector<TrialSummary> trials;

  std::optional<double> mean_ttc() const;
  std::optional<double> mean_objective() const;
  std::optional<double> mean_realized_rate() const;
  /// Median over trials of the per-trial compute time per vehicle.
  std::optional<double> median_compute_ms() const;
  std::size_t safety_violations() const;
};

struct ComparisonReport
{
  ComparisonSpec spec;
  std::vector<CellSummary> cells;

  const CellSummary * find(Algorithm algorithm, double sigma) const;
};

/// Configuration of one trial of one cell.
RunConfig trial_config(const ComparisonSpec & spec, Algorithm algorithm, double sigma, std::size_t trial);

TrialSummary summarize(const RunResult & result, std::uint64_t seed);

/**
 * Runs every (algorithm, sigma, trial). Each trial lasts ten Webster cycles
 * for its rates unless the base config fixes a duration, with seed
 * base.seed + trial. Combined cells that exceed max_batch and signal cells
 * whose Webster timing is undefined are marked refused.
 */
ComparisonReport run_comparison(
  const ComparisonSpec & spec, const std::function<void(const CellSummary &)> & on_cell = {});

/// Deterministic report (no wall-clock values).
nlohmann::json report_json(const ComparisonReport & report);
/// Compute-time statistics per cell.
nlohmann::json timing_json(const ComparisonReport & report);

/// report.json, timing.json and figs/{ttc,objective,pool,realized,compute}.csv.
void write_report(const std::filesystem::path & dir, const ComparisonReport & report);

}  // namespace aim
