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

#include "doctest.h"

#include "aim/errors.hpp"
#include "aim/ocp.hpp"
#include "aim/safety.hpp"

#include <cmath>
#include <vector>

using namespace aim;

TEST_CASE("safe following distance")
{
  CHECK(safe_following_distance(7.0, 7.0, 4.3, 0.2, -3.0) == doctest::Approx(4.5));
  CHECK(safe_following_distance(11.11, 0.0, 4.3, 0.2, -3.0) ==
        doctest::Approx(4.5 + 11.11 * 11.11 / 6.0));
  CHECK(safe_following_distance(11.11, 0.0, 4.3, 0.2, -3.0) == doctest::Approx(25.072).epsilon(1e-4));
  CHECK(safe_following_distance(0.0, 11.11, 4.3, 0.2, -3.0) == doctest::Approx(4.5));
  CHECK_THROWS_AS(safe_following_distance(1.0, 1.0, 4.3, 0.2, 0.0), DomainError);
  for (double v = 0.0; v < 11.2; v += 0.5) {
    CHECK(safe_following_distance(v, v, 4.3, 0.2, -3.0) == doctest::Approx(4.5));
    CHECK(safe_following_distance(v + 0.1, 3.0, 4.3, 0.2, -3.0) >=
          safe_following_distance(v, 3.0, 4.3, 0.2, -3.0));
    CHECK(safe_following_distance(5.0, v + 0.1, 4.3, 0.2, -3.0) <=
          safe_following_distance(5.0, v, 4.3, 0.2, -3.0));
  }
}

TEST_CASE("rear-end checker")
{
  const auto lead = integrate(-30.0, 0.0, std::vector<double>{0.0}, 0.1);
  const auto follow = integrate(-60.0, 11.11, std::vector<double>{}, 0.1);
  auto rep = rear_end_ok(follow, lead, 4.3, 0.2, -3.0, 1e-6);
  CHECK(rep.min_margin == doctest::Approx(30.0 - 25.072).epsilon(1e-4));

  const auto parked = integrate(-34.5, 0.0, std::vector<double>{0.0}, 0.1);
  rep = rear_end_ok(parked, lead, 4.3, 0.2, -3.0, 0.0);
  CHECK(rep.ok());
  CHECK(rep.min_margin == doctest::Approx(0.0).epsilon(1e-12));

  const auto close = integrate(-34.4, 0.0, std::vector<double>{0.0}, 0.1);
  rep = rear_end_ok(close, lead, 4.3, 0.2, -3.0, 1e-6);
  CHECK_FALSE(rep.ok());
  CHECK(rep.min_margin == doctest::Approx(-0.1));
  CHECK(rep.violations.size() == 2);

  auto off = lead;
  off.t0 = 0.05;
  CHECK_THROWS_AS(rear_end_ok(close, off, 4.3, 0.2, -3.0, 1e-6), ContractViolation);
}

TEST_CASE("entry prevention cap")
{
  CHECK(entry_prevention_cap(0.0, -3.0) == 0.0);
  CHECK(entry_prevention_cap(-60.0, -3.0) == doctest::Approx(std::sqrt(360.0)));
  CHECK(entry_prevention_cap(-20.576, -3.0) == doctest::Approx(11.11).epsilon(1e-4));
  CHECK_THROWS_AS(entry_prevention_cap(0.1, -3.0), DomainError);
  double prev = entry_prevention_cap(-60.0, -3.0);
  for (double x = -59.5; x <= 0.0; x += 0.5) {
    const double c = entry_prevention_cap(x, -3.0);
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("full braking from under the cap stops before the line")
{
  const double dt = 0.1;
  for (double x = -60.0; x <= 0.0; x += 1.5) {
    for (double frac = 0.0; frac <= 1.0; frac += 0.125) {
      const double v0 = frac * entry_prevention_cap(x, -3.0);
      double xx = x;
      double v = v0;
      while (v > 0.0) {
        const double u = -3.0;
        const double step = std::min(dt, v / 3.0);
        xx += v * step + 0.5 * u * step * step;
        v += u * step;
      }
      CHECK(xx <= 1e-9 + v0 * dt);
    }
  }
}

TEST_CASE("sampled envelope is invariant under braking")
{
  for (double x = -60.0; x <= -0.01; x += 2.5) {
    for (double frac = 0.0; frac <= 1.0; frac += 0.25) {
      // largest speed with nonpositive sampled envelope
      const double a = 3.0, dt = 0.1;
      const double vcap = (-a * dt + std::sqrt(a * a * dt * dt - 8.0 * a * x)) / 2.0;
      const double v0 = frac * vcap;
      CHECK(discrete_envelope(x, v0, -3.0, dt) <= 1e-9);
      const auto t = braking_trajectory(0.0, x, v0, 0.0, dt, 200, -3.0);
      for (std::size_t k = 0; k < t.x.size(); ++k) {
        CHECK(discrete_envelope(t.x[k], t.v[k], -3.0, dt) <= 1e-9);
        CHECK(t.x[k] <= 1e-12);
      }
    }
  }
}

TEST_CASE("intersection overlap")
{
  CHECK(intersection_overlap_ok(10, 13, 13, 16));
  CHECK_FALSE(intersection_overlap_ok(10, 13, 12, 15));
  CHECK(intersection_overlap_ok(10, 13, 14, 16));
  for (double a = 0.0; a < 5.0; a += 0.7) {
    CHECK(intersection_overlap_ok(a, a + 2, 3, 4) == intersection_overlap_ok(3, 4, a, a + 2));
  }
}

TEST_CASE("arrival gate")
{
  const auto geo = LaneGeometry::standard_four_way();
  const PhysicalParams params;
  CHECK(arrival_gate(11.11, std::nullopt, geo, params) == GateDecision::Admit);
  CHECK(arrival_gate(11.11, LeaderState{-40.0, 0.0, 4.3}, geo, params) == GateDecision::Delay);
  CHECK(arrival_gate(11.11, LeaderState{-30.0, 11.11, 4.3}, geo, params) == GateDecision::Admit);
  CHECK(arrival_gate(11.5, std::nullopt, geo, params) == GateDecision::Delay);
}
