// Copyright 2026 The farda Authors
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

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "farda/geometry.hpp"
#include "farda/random.hpp"

using namespace farda;

namespace {

// Brute-force nearest boundary point on a regular lattice of spacing h.
std::pair<Vec2, double> scan_boundary(const Vec2& p, double h) {
  const Boundary b;
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_point;
  double best_s = 0.0;
  const std::size_t steps = static_cast<std::size_t>(b.total_length() / h);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double s = static_cast<double>(k) * h;
    const Vec2 q = b.point_at(s);
    const double d = std::hypot(q.x - p.x, q.y - p.y);
    if (d < best) {
      best = d;
      best_point = q;
      best_s = s;
    }
  }
  return {best_point, best_s};
}

}  // namespace

TEST_CASE("grid presets") {
  const RegionSpec region;
  const GridSpec full = make_grid(region, GridPreset::kFull);
  CHECK(full.nx == 200);
  CHECK(full.ny == 1200);
  CHECK(full.size() == 240000);
  CHECK(full.dx == 100.0);
  CHECK(full.point(0, 0) == Vec2{3e4, 0.0});
  CHECK(full.point(199, 1199) == Vec2{49900.0, 119900.0});

  const GridSpec train = make_grid(region, GridPreset::kTraining);
  CHECK(train.nx == 40);
  CHECK(train.ny == 120);
  CHECK(train.size() == 4800);
  CHECK(full.size() / train.size() == 50);
  CHECK(train.point(0, 0).y == 60000.0);
  // n' = n / 10 along y, m' = m / 5 along x
  CHECK(train.ny * 10 == full.ny);
  CHECK(train.nx * 5 == full.nx);

  const GridSpec toy = make_grid(region, GridPreset::kToy);
  CHECK(toy.nx == 20);
  CHECK(toy.ny == 12);

  CHECK(full.index(3, 2) == 2 * 200 + 3);
  CHECK(parse_grid_preset("training") == GridPreset::kTraining);
  CHECK(grid_preset_name(GridPreset::kToy) == "toy");
  CHECK_THROWS_AS(parse_grid_preset("huge"), std::invalid_argument);
}

TEST_CASE("region invariants") {
  const RegionSpec r;
  CHECK(r.jam_x.lo >= r.surveil_x.lo);
  CHECK(r.jam_x.hi <= r.surveil_x.hi);
  CHECK(r.deploy_y.lo >= r.surveil_y.lo);
  CHECK(r.deploy_y.hi == r.jam_y.lo);  // shared closure line only
  CHECK(r.deploy_x.hi == r.jam_x.lo);
}

TEST_CASE("scenario sampling") {
  const RegionSpec region;
  CHECK(sample_scenario(17, region) == sample_scenario(17, region));
  CHECK_FALSE(sample_scenario(17, region) == sample_scenario(18, region));

  double sum_x = 0.0;
  double sum_y = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Scenario s = sample_scenario(seed, region);
    REQUIRE(s.jammers.size() == kDefaultJammerCount);
    for (const Coord& c : s.jammers) {
      REQUIRE(region.in_jam(c));
      sum_x += static_cast<double>(c.x);
      sum_y += static_cast<double>(c.y);
      ++n;
    }
  }
  CHECK(std::abs(sum_x / n - 4.5e4) < 0.01 * 4.5e4);
  CHECK(std::abs(sum_y / n - 9e4) < 0.01 * 9e4);
}

TEST_CASE("arclength to point") {
  const Boundary b;
  CHECK(b.total_length() == 7e4);
  CHECK(b.corner() == Vec2{4e4, 6e4});
  CHECK(b.point_at(0.0) == Vec2{3e4, 6e4});
  CHECK(b.point_at(1e4) == Vec2{4e4, 6e4});
  CHECK(b.point_at(4e4) == Vec2{4e4, 3e4});
  CHECK(b.point_at(7e4) == Vec2{4e4, 0.0});
  CHECK_THROWS_AS(b.point_at(-1.0), std::domain_error);
  CHECK_THROWS_AS(b.point_at(7e4 + 1.0), std::domain_error);

  // unit speed
  const Vec2 a = b.point_at(2e4);
  const Vec2 c = b.point_at(2e4 + 123.0);
  CHECK(std::hypot(a.x - c.x, a.y - c.y) == doctest::Approx(123.0));
}

TEST_CASE("projection") {
  const Boundary b;
  auto p = b.project({3.5e4, 7e4});
  CHECK(p.point == Vec2{3.5e4, 6e4});
  CHECK(p.arclength == 5e3);

  p = b.project({5e4, 3e4});
  CHECK(p.point == Vec2{4e4, 3e4});
  CHECK(p.arclength == 4e4);

  p = b.project({4.5e4, 6.5e4});
  CHECK(p.point == b.corner());
  CHECK(p.arclength == 1e4);
  const auto [scan_point, scan_s] = scan_boundary({4.5e4, 6.5e4}, 1.0);
  CHECK(scan_point == b.corner());
  CHECK(scan_s == 1e4);

  // Equidistant from both segments: the upper one (smaller s) wins.
  p = b.project({3.9e4, 5.9e4});
  CHECK(p.point == Vec2{3.9e4, 6e4});
  CHECK(p.arclength == 9e3);
}

TEST_CASE("projection matches brute-force scan") {
  const Boundary b;
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p{uniform(rng, 2.5e4, 5.5e4), uniform(rng, -1e4, 1.3e5)};
    const BoundaryProjection proj = b.project(p);
    const double d = std::hypot(proj.point.x - p.x, proj.point.y - p.y);
    const Vec2 q = scan_boundary(p, 1.0).first;
    REQUIRE(d <= std::hypot(q.x - p.x, q.y - p.y) + 0.5);
    REQUIRE(b.point_at(proj.arclength).x == doctest::Approx(proj.point.x));
    REQUIRE(b.point_at(proj.arclength).y == doctest::Approx(proj.point.y));
  }
}

TEST_CASE("arclength round trip") {
  const Boundary b;
  Rng rng(9);
  for (int k = 0; k < 2000; ++k) {
    // Integer and half-integer arclengths are exactly representable.
    const double s = std::floor(uniform(rng, 0.0, 7e4) * 2.0) / 2.0;
    const BoundaryProjection p = b.project(b.point_at(s));
    REQUIRE(p.arclength == s);
    REQUIRE(b.arclength_of(b.point_at(s)) == s);
  }
  for (double s : {0.0, 1e4, 7e4, 0.1, 12345.678}) {
    // off by at most one ulp of the boundary coordinates
    CHECK(std::abs(b.project(b.point_at(s)).arclength - s) <= 1.5e-11);
  }
}

TEST_CASE("snap to lattice") {
  const Boundary b;
  CHECK(b.snap({35000.4, 60000.0}) == Coord{35000, 60000});
  CHECK(b.snap({40000.0, 123.5}) == Coord{40000, 124});
  CHECK(b.snap({30000.5, 60000.0}) == Coord{30001, 60000});
  Rng rng(3);
  const RegionSpec region;
  for (int k = 0; k < 1000; ++k) {
    const Coord c = b.snap(b.point_at(uniform(rng, 0.0, 7e4)));
    REQUIRE(b.on_lattice(c));
    REQUIRE(region.in_deploy(c));
  }
  CHECK_FALSE(b.on_lattice({35000, 59999}));
}

TEST_CASE("scenario file format") {
  const auto e = parse_scenario_line("7,41000,61000,42000,62000,43000,63000");
  REQUIRE(e);
  CHECK(e->id == 7);
  CHECK(e->scenario.jammers[2] == Coord{43000, 63000});
  CHECK(format_scenario_line(*e) == "7,41000,61000,42000,62000,43000,63000");

  CHECK_FALSE(parse_scenario_line("7,41000,61000,42000"));
  CHECK_FALSE(parse_scenario_line("x,1,2,3,4,5,6"));
  CHECK_FALSE(parse_scenario_line("1,1.5,2,3,4,5,6"));

  std::istringstream in(
      "# header comment\n"
      "0,41000,61000,42000,62000,43000,63000\n"
      "\n"
      "bad line\n"
      "1,44000,64000,45000,65000,46000,66000\r\n");
  const ScenarioFile f = read_scenario_file(in);
  CHECK(f.entries.size() == 2);
  CHECK(f.warnings.size() == 1);
  CHECK(f.entries[1].id == 1);

  const auto ds = generate_dataset(25, 77, RegionSpec{});
  std::ostringstream out;
  write_scenario_file(out, ds);
  std::istringstream back(out.str());
  const ScenarioFile g = read_scenario_file(back);
  REQUIRE(g.entries.size() == ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    CHECK(g.entries[k].id == ds[k].id);
    CHECK(g.entries[k].scenario == ds[k].scenario);
  }
  CHECK(generate_dataset(25, 77, RegionSpec{})[24].scenario == ds[24].scenario);
}
