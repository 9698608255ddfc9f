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

#include "aim/engine.hpp"
#include "aim/signalized.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>

namespace aim
{

/**
 * Reads an INI run configuration. Sections and keys:
 *
 *   [run]        algorithm, seed, dt, duration, t_coop, t_c, t_h, max_batch
 *   [arrivals]   sigma (every lane), lane.<id> (overrides one lane)
 *   [vehicle]    u_min, u_max, v_max, v_min, robustness, length
 *   [objective]  w_v, w_a, w_j
 *   [scheduling] profile (comparison1..comparison4), then any of
 *                w_x, w_v, w_t, w_n, w_s, w_sigma, w_w, w_l
 *   [signal]     sat_flow, lost_per_phase
 *   [solver]     tolerance, primal_tolerance, max_iterations
 *
 * Missing keys keep their defaults. Unknown sections or keys throw ConfigError.
 */
RunConfig parse_run_config(std::istream & is);
RunConfig load_run_config(const std::filesystem::path & path);

/// Throws ConfigError for unknown names.
WeightProfile parse_profile(std::string_view name);

nlohmann::json to_json(const RunConfig & config);
nlohmann::json to_json(const SignalPlan & plan);

}  // namespace aim
