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
#include "aim/trajectory.hpp"

#include <sstream>
#include <vector>

using namespace aim;

TEST_CASE("integrate examples")
{
  auto t = integrate(-60.0, 0.0, std::vector<double>{0.0, 0.0}, 0.1);
  CHECK(t.x == std::vector<double>{-60.0, -60.0, -60.0});
  CHECK(t.v == std::vector<double>{0.0, 0.0, 0.0});

  t = integrate(0.0, 10.0, std::vector<double>(10, 0.0), 0.1);
  CHECK(t.x[10] == doctest::Approx(10.0));

  t = integrate(0.0, 0.0, std::vector<double>(10, 3.0), 0.1);
  CHECK(t.v[10] == doctest::Approx(3.0));
  CHECK(t.x[10] == doctest::Approx(0.5 * 3.0 * 1.0));
}

TEST_CASE("re-integration reproduces samples exactly")
{
  const std::vector<double> u{1.0, -2.0, 0.5, 3.0, -3.0, 0.0, 2.5};
  const auto a = integrate(-42.0, 6.0, u, 0.1, 3.0, 0.7);
  const auto b = integrate(a.x[0], a.v[0], a.u, a.dt, a.t0, a.u_prev);
  CHECK(a.x == b.x);
  CHECK(a.v == b.v);
}

TEST_CASE("crossing time")
{
  SampledTrajectory t;
  t.t0 = 1.9;
  t.dt = 0.1;
  t.u = {0.0, 0.0};
  t.x = {19.8, 19.9, 20.2};
  t.v = {1.0, 1.0, 1.0};
  CHECK(*crossing_time(t, 20.0) == doctest::Approx(2.0 + 0.1 * (0.1 / 0.3)));
  CHECK(*crossing_time(t, 19.0) == doctest::Approx(1.9));
  CHECK_FALSE(crossing_time(t, 25.0).has_value());

  const auto ride = integrate(-10.0, 5.0, std::vector<double>(50, 0.5), 0.1);
  double prev = -1.0;
  for (double pos = -9.0; pos < 20.0; pos += 0.7) {
    const auto c = crossing_time(ride, pos);
    REQUIRE(c);
    CHECK(*c >= prev);
    prev = *c;
  }
}

TEST_CASE("objective examples")
{
  const ObjectiveWeights w{1.0, 1.0, 1.0};
  const auto still = integrate(-60.0, 0.0, std::vector<double>(300, 0.0), 0.1);
  CHECK(vehicle_objective(still, w, 0.0, 30.0) == 0.0);

  const auto cruise = integrate(-60.0, 11.11, std::vector<double>(300, 0.0), 0.1);
  CHECK(vehicle_objective(cruise, {1.0, 0.0, 0.0}, 0.0, 30.0) == doctest::Approx(333.3));

  std::vector<double> pulse(1000, 0.0);
  for (int k = 0; k < 100; ++k) pulse[k] = 1.0;
  const auto p = integrate(-60.0, 0.0, pulse, 0.01);
  CHECK(vehicle_objective(p, {0.0, 1.0, 0.0}, 0.0, 10.0) == doctest::Approx(-1.0));

  CHECK_THROWS_AS(vehicle_objective(cruise, w, -0.1, 30.0), ContractViolation);
}

TEST_CASE("objective pads past the end at constant speed")
{
  const auto short_ride = integrate(-60.0, 10.0, std::vector<double>(100, 0.0), 0.1);
  CHECK(vehicle_objective(short_ride, {1.0, 0.0, 0.0}, 0.0, 30.0) == doctest::Approx(300.0));
}

TEST_CASE("objective equals displacement up to one step")
{
  std::vector<double> u(300);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = (k / 20) % 2 == 0 ? 0.3 : -0.3;
  const auto t = integrate(-60.0, 5.0, u, 0.1);
  const double disp = t.x.back() - t.x.front();
  const double vmax = 5.0 + 0.3 * 2.0;
  CHECK(std::abs(vehicle_objective(t, {1.0, 0.0, 0.0}, 0.0, 30.0) - disp) <= vmax * 0.1);
}

TEST_CASE("jerk uses the preceding acceleration")
{
  const auto t = integrate(0.0, 5.0, std::vector<double>{1.0, 1.0}, 0.1, 0.0, 0.0);
  // jerk 10 m/s^3 on the first step only.
  CHECK(vehicle_objective(t, {0.0, 0.0, 1.0}, 0.0, 0.2) == doctest::Approx(-100.0 * 0.1));
  const auto s = integrate(0.0, 5.0, std::vector<double>{1.0, 1.0}, 0.1, 0.0, 1.0);
  CHECK(vehicle_objective(s, {0.0, 0.0, 1.0}, 0.0, 0.2) == doctest::Approx(0.0));
}

TEST_CASE("bound checks")
{
  PhysicalParams params;
  auto t = integrate(0.0, 11.0, std::vector<double>{0.0, 0.0}, 0.1);
  CHECK(check_bounds(t, params, 1e-6).empty());
  t.v[1] = 11.12;
  auto rep = check_bounds(t, params, 1e-6);
  REQUIRE(rep.size() == 1);
  CHECK(rep[0].quantity == BoundQuantity::VelocityHigh);
  CHECK(rep[0].magnitude == doctest::Approx(0.01));
  t = integrate(0.0, 11.0, std::vector<double>{-3.5}, 0.1);
  rep = check_bounds(t, params, 1e-6);
  REQUIRE(rep.size() == 1);
  CHECK(rep[0].quantity == BoundQuantity::AccelLow);
  CHECK(rep[0].magnitude == doctest::Approx(0.5));
}

TEST_CASE("window and splice")
{
  const auto a = integrate(-60.0, 10.0, std::vector<double>(30, 0.0), 0.1);
  const auto w = window(a, 2.0, 20);
  CHECK(w.t0 == doctest::Approx(2.0));
  CHECK(w.x[0] == doctest::Approx(-40.0));
  CHECK(w.x[20] == doctest::Approx(-20.0));
  CHECK(w.u_prev == 0.0);

  const auto tail = integrate(a.x[10], a.v[10], std::vector<double>(10, -1.0), 0.1, 1.0, 0.0);
  const auto joined = splice(a, tail);
  CHECK(joined.steps() == 20);
  CHECK(joined.x[10] == a.x[10]);
  CHECK(joined.v[20] == doctest::Approx(9.0));
}

TEST_CASE("trajectory csv")
{
  std::ostringstream os;
  write_trajectory_csv(os, integrate(0.0, 1.0, std::vector<double>{0.5}, 0.1), 7);
  const auto text = os.str();
  CHECK(text.rfind("vehicle,t,x,v,u\n", 0) == 0);
  CHECK(text.find("7,0.100000,0.102500000,1.050000000,\n") != std::string::npos);
}
