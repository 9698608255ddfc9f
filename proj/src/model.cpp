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

#include "aim/model.hpp"

#include "aim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aim
{

namespace
{

constexpr double kGeomEps = 1e-12;

double cross(const Point & o, const Point & a, const Point & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(const Point & o, const Point & a, const Point & b)
{
  const double c = cross(o, a, b);
  if (c > kGeomEps) return 1;
  if (c < -kGeomEps) return -1;
  return 0;
}

bool on_segment(const Point & p, const Segment & s)
{
  return std::min(s.a.x, s.b.x) - kGeomEps <= p.x && p.x <= std::max(s.a.x, s.b.x) + kGeomEps &&
         std::min(s.a.y, s.b.y) - kGeomEps <= p.y && p.y <= std::max(s.a.y, s.b.y) + kGeomEps;
}

double signed_area(const Polyline & poly)
{
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point & p = poly[i];
    const Point & q = poly[(i + 1) % poly.size()];
    area += p.x * q.y - q.x * p.y;
  }
  return 0.5 * area;
}

bool is_convex(const Polyline & poly)
{
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const int o = orientation(poly[i], poly[(i + 1) % poly.size()], poly[(i + 2) % poly.size()]);
    if (o == 0) continue;
    if (sign == 0) sign = o;
    if (o != sign) return false;
  }
  return sign != 0;
}

double length(const Segment & s) { return std::hypot(s.b.x - s.a.x, s.b.y - s.a.y); }

}  // namespace

bool segments_intersect(const Segment & s, const Segment & t)
{
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(t.a, s)) return true;
  if (o2 == 0 && on_segment(t.b, s)) return true;
  if (o3 == 0 && on_segment(s.a, t)) return true;
  if (o4 == 0 && on_segment(s.b, t)) return true;
  return false;
}

// Cyrus-Beck clipping of every polyline segment against a convex polygon.
std::vector<Segment> clip_to_convex_polygon(const Polyline & path, const Polyline & polygon)
{
  std::vector<Segment> out;
  const double orient = signed_area(polygon) > 0.0 ? 1.0 : -1.0;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const Point p0 = path[s];
    const Point p1 = path[s + 1];
    const double dx = p1.x - p0.x;
    const double dy = p1.y - p0.y;
    double t_lo = 0.0;
    double t_hi = 1.0;
    bool outside = false;
    for (std::size_t e = 0; e < polygon.size() && !outside; ++e) {
      const Point & a = polygon[e];
      const Point & b = polygon[(e + 1) % polygon.size()];
      // Inside means orient * cross(a, b, p) >= 0.
      const double ex = b.x - a.x;
      const double ey = b.y - a.y;
      const double f0 = orient * (ex * (p0.y - a.y) - ey * (p0.x - a.x));
      const double df = orient * (ex * dy - ey * dx);
      if (std::abs(df) < kGeomEps) {
        if (f0 < -kGeomEps) outside = true;
        continue;
      }
      const double t = -f0 / df;
      if (df > 0.0) {
        t_lo = std::max(t_lo, t);
      } else {
        t_hi = std::min(t_hi, t);
      }
      if (t_lo > t_hi) outside = true;
    }
    if (outside || t_hi - t_lo < kGeomEps) continue;
    out.push_back({{p0.x + t_lo * dx, p0.y + t_lo * dy}, {p0.x + t_hi * dx, p0.y + t_hi * dy}});
  }
  return out;
}

LaneGeometry::LaneGeometry(std::vector<LaneSpec> lanes, Polyline intersection, double approach_length)
: polygon_(std::move(intersection)), approach_length_(approach_length)
{
  if (!(approach_length_ > 0.0)) {
    throw ConfigError("approach length d must be positive");
  }
  if (polygon_.size() < 3 || !is_convex(polygon_)) {
    throw ConfigError("intersection polygon must be convex with at least 3 vertices");
  }
  if (lanes.empty()) {
    throw ConfigError("geometry needs at least one lane");
  }
  std::sort(lanes.begin(), lanes.end(), [](const LaneSpec & a, const LaneSpec & b) { return a.id < b.id; });
  for (auto & lane : lanes) {
    if (index_.count(lane.id) != 0) {
      throw ConfigError("duplicate lane id " + std::to_string(lane.id));
    }
    if (lane.path.size() < 2) {
      throw ConfigError("lane " + std::to_string(lane.id) + " path needs at least two points");
    }
    index_[lane.id] = lane_ids_.size();
    lane_ids_.push_back(lane.id);
    auto pieces = clip_to_convex_polygon(lane.path, polygon_);
    double derived = 0.0;
    for (const auto & seg : pieces) derived += length(seg);
    const double span = lane.span.value_or(derived);
    if (!(span > 0.0)) {
      throw ConfigError("lane " + std::to_string(lane.id) + " has no positive span inside the intersection");
    }
    spans_.push_back(span);
    interiors_.push_back(std::move(pieces));
    paths_.push_back(std::move(lane.path));
  }

  const std::size_t n = lane_ids_.size();
  table_.assign(n, std::vector<Compatibility>(n, Compatibility::Compatible));
  for (std::size_t a = 0; a < n; ++a) {
    table_[a][a] = Compatibility::Same;
    for (std::size_t b = a + 1; b < n; ++b) {
      Compatibility c = Compatibility::Compatible;
      if (paths_[a] == paths_[b]) {
        c = Compatibility::Same;
      } else {
        for (const auto & s : interiors_[a]) {
          for (const auto & t : interiors_[b]) {
            if (segments_intersect(s, t)) c = Compatibility::Incompatible;
          }
        }
      }
      table_[a][b] = c;
      table_[b][a] = c;
    }
  }
}

LaneGeometry LaneGeometry::standard_four_way()
{
  const double d = 60.0;
  const double half = 10.0;
  const double offset = 5.0;
  const double far = half + d;
  std::vector<LaneSpec> lanes{
    {2, {{offset, -far}, {offset, far}}, 20.0},
    {5, {{far, offset}, {-far, offset}}, 20.0},
    {8, {{-offset, far}, {-offset, -far}}, 20.0},
    {11, {{-far, -offset}, {far, -offset}}, 20.0},
  };
  Polyline box{{-half, -half}, {half, -half}, {half, half}, {-half, half}};
  return LaneGeometry(std::move(lanes), std::move(box), d);
}

std::size_t LaneGeometry::index_of(LaneId lane) const
{
  const auto it = index_.find(lane);
  if (it == index_.end()) {
    throw ConfigError("unknown lane id " + std::to_string(lane));
  }
  return it->second;
}

double LaneGeometry::span(LaneId lane) const { return spans_[index_of(lane)]; }

Compatibility LaneGeometry::compatibility(LaneId l, LaneId m) const
{
  return table_[index_of(l)][index_of(m)];
}

const Polyline & LaneGeometry::path(LaneId lane) const { return paths_[index_of(lane)]; }

const std::vector<Segment> & LaneGeometry::interior(LaneId lane) const
{
  return interiors_[index_of(lane)];
}

void PhysicalParams::validate() const
{
  if (!(u_min < 0.0 && 0.0 < u_max)) throw ConfigError("need u_min < 0 < u_max");
  if (!(v_max > 0.0)) throw ConfigError("v_max must be positive");
  if (v_min != 0.0) throw ConfigError("v_min is fixed at 0");
  if (!(robustness >= 0.0)) throw ConfigError("robustness r must be nonnegative");
  if (!(vehicle_length > 0.0)) throw ConfigError("vehicle length must be positive");
}

int follower(const VehicleState & i, const VehicleState & j, std::span<const VehicleState> snapshot)
{
  if (i.lane != j.lane || !(i.x < j.x)) return 0;
  for (const auto & k : snapshot) {
    if (k.lane == i.lane && i.x < k.x && k.x < j.x) return 0;
  }
  return 1;
}

}  // namespace aim
