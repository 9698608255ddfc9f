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

#include <vector>

namespace aim
{

/// Committed use of the intersection by a vehicle with a coordinated trajectory.
struct ScheduleEntry
{
  VehicleId vehicle{0};
  LaneId lane{0};
  double entry{0.0};
  double exit{0.0};
};

using ScheduledSet = std::vector<ScheduleEntry>;

}  // namespace aim
