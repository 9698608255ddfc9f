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

#include "aim/config.hpp"
#include "aim/engine.hpp"
#include "aim/errors.hpp"
#include "aim/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

struct Common
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<std::size_t> max_batch;
  std::string out_dir{"out"};
};

void add_common(CLI::App & app, Common & c)
{
  app.add_option("--config", c.config, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--dt", c.dt, "Time step [s]")->check(CLI::PositiveNumber);
  app.add_option("--max-batch", c.max_batch, "Largest pool for combined optimization");
  app.add_option("--out-dir", c.out_dir, "Output directory");
}

aim::RunConfig base_config(const Common & c)
{
  aim::RunConfig config = c.config.empty() ? aim::RunConfig{} : aim::load_run_config(c.config);
  if (c.seed) config.seed = *c.seed;
  if (c.dt) config.dt = *c.dt;
  if (c.max_batch) config.max_batch = *c.max_batch;
  return config;
}

int run_single(const Common & common, const std::optional<std::string> & algo, const std::optional<double> & sigma,
               const std::optional<double> & duration)
{
  auto config = base_config(common);
  if (algo) config.algorithm = aim::parse_algorithm(*algo);
  if (sigma) config.lane_rates = aim::uniform_rates(config.geometry, *sigma);
  if (duration) config.duration = *duration;
  config.validate();
  const auto result = aim::run(config);
  aim::write_run_outputs(common.out_dir, config, result);

  std::size_t crossed = 0;
  for (const auto & v : result.vehicles) crossed += v.crossed ? 1 : 0;
  const auto ttc = aim::avg_ttc(result.vehicles);
  const auto obj = aim::avg_objective(result.vehicles);
  fmt::print("algorithm   {}\n", aim::to_string(config.algorithm));
  fmt::print("duration    {:.1f} s\n", result.duration);
  fmt::print("vehicles    {} admitted, {} crossed\n", result.vehicles.size(), crossed);
  fmt::print("avg TTC     {}\n", ttc ? fmt::format("{:.3f} s", *ttc) : "n/a");
  fmt::print("avg J       {}\n", obj ? fmt::format("{:.3f}", *obj) : "n/a");
  fmt::print("rounds      {}\n", result.rounds.size());
  fmt::print("safety      {}\n", result.safety.ok() ? "ok" : "VIOLATED");
  fmt::print("outputs     {}\n", common.out_dir);
  return result.safety.ok() ? 0 : 3;
}

int run_compare(const Common & common, const std::vector<std::string> & algos, const std::vector<double> & sigmas,
                std::size_t trials, const std::string & pattern, const std::optional<std::string> & profile,
                const std::optional<double> & duration, const std::string & name)
{
  aim::ComparisonSpec spec;
  spec.name = name;
  spec.base = base_config(common);
  if (duration) spec.base.duration = *duration;
  for (const auto & a : algos) spec.algorithms.push_back(aim::parse_algorithm(a));
  spec.sigmas = sigmas;
  spec.trials = trials;
  if (pattern == "homogeneous") {
    spec.pattern = aim::RatePattern::Homogeneous;
  } else if (pattern == "inhomogeneous") {
    spec.pattern = aim::RatePattern::Inhomogeneous;
  } else {
    throw aim::ConfigError(fmt::format("unknown rate pattern '{}'", pattern));
  }
  if (profile) spec.profile = aim::parse_profile(*profile);

  fmt::print("{:<9} {:>6} {:>10} {:>12} {:>10} {:>12} {:>6}\n", "algorithm", "sigma", "TTC [s]", "objective",
             "realized", "ms/vehicle", "unsafe");
  const auto report = aim::run_comparison(spec, [](const aim::CellSummary & c) {
    const auto show = [](const std::optional<double> & v, int prec) {
      return v ? fmt::format("{:.{}f}", *v, prec) : std::string("-");
    };
    if (c.refused) {
      fmt::print("{:<9} {:>6.3f} refused: {}\n", aim::to_string(c.algorithm), c.sigma, c.refusal);
      return;
    }
    fmt::print("{:<9} {:>6.3f} {:>10} {:>12} {:>10} {:>12} {:>6}\n", aim::to_string(c.algorithm), c.sigma,
               show(c.mean_ttc(), 3), show(c.mean_objective(), 2), show(c.mean_realized_rate(), 4),
               show(c.median_compute_ms(), 3), c.safety_violations());
    std::fflush(stdout);
  });
  aim::write_report(common.out_dir, report);
  fmt::print("report      {}\n", (std::filesystem::path(common.out_dir) / "report.json").string());
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Intersection management simulator"};
  app.require_subcommand(1);

  Common run_opts;
  std::optional<std::string> run_algo;
  std::optional<double> run_sigma;
  std::optional<double> run_duration;
  auto * run_cmd = app.add_subcommand("run", "Simulate one configuration");
  add_common(*run_cmd, run_opts);
  run_cmd->add_option("--algo", run_algo, "ddswa, fifo, combined or signal");
  run_cmd->add_option("--sigma", run_sigma, "Arrival rate on every lane [veh/s]")->check(CLI::PositiveNumber);
  run_cmd->add_option("--duration", run_duration, "Simulated time [s]")->check(CLI::PositiveNumber);

  Common cmp_opts;
  std::vector<std::string> cmp_algos{"ddswa", "fifo", "signal"};
  std::vector<double> cmp_sigmas{0.1, 0.3, 0.5};
  std::size_t cmp_trials = 20;
  std::string cmp_pattern = "homogeneous";
  std::optional<std::string> cmp_profile;
  std::optional<double> cmp_duration;
  std::string cmp_name = "comparison";
  auto * cmp_cmd = app.add_subcommand("compare", "Run a trial grid over algorithms and arrival rates");
  add_common(*cmp_cmd, cmp_opts);
  cmp_cmd->add_option("--algo", cmp_algos, "Algorithms to compare")->delimiter(',');
  cmp_cmd->add_option("--sigma", cmp_sigmas, "Arrival rates [veh/s]")->delimiter(',');
  cmp_cmd->add_option("--trials", cmp_trials, "Trials per cell")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--pattern", cmp_pattern, "homogeneous or inhomogeneous");
  cmp_cmd->add_option("--profile", cmp_profile, "Weight profile comparison1..comparison4");
  cmp_cmd->add_option("--duration", cmp_duration, "Fixed simulated time instead of 10 signal cycles [s]")
    ->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--name", cmp_name, "Report name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_single(run_opts, run_algo, run_sigma, run_duration);
    return run_compare(cmp_opts, cmp_algos, cmp_sigmas, cmp_trials, cmp_pattern, cmp_profile, cmp_duration, cmp_name);
  } catch (const aim::ConfigError & e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const aim::SafetyViolation & e) {
    std::cerr << "safety violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
