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

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace aim
{

using LaneId = int;
using VehicleId = int;

struct Point
{
  double x{0.0};
  double y{0.0};
  bool operator==(const Point &) const = default;
};

using Polyline = std::vector<Point>;

struct Segment
{
  Point a;
  Point b;
};

/// Pairwise lane relation: same path, conflicting paths, or disjoint paths.
enum class Compatibility : int { Same = -1, Incompatible = 0, Compatible = 1 };

struct LaneSpec
{
  LaneId id{0};
  Polyline path;
  /// Length of the path inside the intersection; derived from the polygon when absent.
  std::optional<double> span;
};

/**
 * Geometry of the region of interest: approach lanes of common length d, each
 * with a planar path, and a convex intersection polygon.
 *
 * The compatibility table is derived once at construction by clipping every
 * lane path to the polygon and testing the interior pieces for intersection.
 */
class LaneGeometry
{
public:
  LaneGeometry(std::vector<LaneSpec> lanes, Polyline intersection, double approach_length);

  /// Four branches, straight-through lanes {2, 5, 8, 11}, d = 60 m, 20 m x 20 m box.
  static LaneGeometry standard_four_way();

  const std::vector<LaneId> & lanes() const { return lane_ids_; }
  double approach_length() const { return approach_length_; }
  double span(LaneId lane) const;
  Compatibility compatibility(LaneId l, LaneId m) const;
  bool incompatible(LaneId l, LaneId m) const
  {
    return compatibility(l, m) == Compatibility::Incompatible;
  }
  bool has_lane(LaneId lane) const { return index_.count(lane) != 0; }
  const Polyline & path(LaneId lane) const;
  const Polyline & intersection() const { return polygon_; }
  /// Pieces of the lane path lying inside the intersection polygon.
  const std::vector<Segment> & interior(LaneId lane) const;

private:
  std::size_t index_of(LaneId lane) const;

  std::vector<LaneId> lane_ids_;
  std::map<LaneId, std::size_t> index_;
  std::vector<Polyline> paths_;
  std::vector<std::vector<Segment>> interiors_;
  std::vector<double> spans_;
  std::vector<std::vector<Compatibility>> table_;
  Polyline polygon_;
  double approach_length_;
};

// Geometry helpers, exposed for testing.
bool segments_intersect(const Segment & s, const Segment & t);
std::vector<Segment> clip_to_convex_polygon(const Polyline & path, const Polyline & polygon);

/// Vehicle and actuation limits shared by every vehicle.
struct PhysicalParams
{
  double u_min{-3.0};
  double u_max{3.0};
  double v_max{11.11};
  double v_min{0.0};
  double robustness{0.2};
  double vehicle_length{4.3};

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

enum class Phase { Provisional, Coordinated };

struct VehicleState
{
  VehicleId id{0};
  LaneId lane{0};
  double length{4.3};
  double x{0.0};
  double v{0.0};
  double t_arrival{0.0};
  double t_coord{0.0};
  Phase phase{Phase::Provisional};
  std::optional<double> t_entry;
  std::optional<double> t_exit;
  double last_accel{0.0};
};

/// 1 iff i immediately follows j on the same lane in the snapshot.
int follower(const VehicleState & i, const VehicleState & j, std::span<const VehicleState> snapshot);

}  // namespace aim
