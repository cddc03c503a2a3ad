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

// Surveillance, jamming and deployment regions; sampling grids; the
// deployable boundary with its arclength parameterization; scenario
// sampling and the scenario CSV format.

#ifndef FARDA_GEOMETRY_HPP_
#define FARDA_GEOMETRY_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace farda {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Integer lattice position in meters.
struct Coord {
  std::int64_t x = 0;
  std::int64_t y = 0;

  Vec2 as_vec() const {
    return {static_cast<double>(x), static_cast<double>(y)};
  }
  friend bool operator==(const Coord&, const Coord&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct RegionSpec {
  Interval surveil_x{3e4, 5e4};
  Interval surveil_y{0.0, 1.2e5};
  Interval jam_x{4e4, 5e4};
  Interval jam_y{6e4, 1.2e5};
  Interval deploy_x{3e4, 4e4};
  Interval deploy_y{0.0, 6e4};

  bool in_jam(const Coord& c) const {
    return jam_x.contains(c.as_vec().x) && jam_y.contains(c.as_vec().y);
  }
  bool in_deploy(const Coord& c) const {
    return deploy_x.contains(c.as_vec().x) && deploy_y.contains(c.as_vec().y);
  }
};

// Regular vertex grid. Rows run along y, columns along x; storage is
// row-major so index(i, j) = j * nx + i.
struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  std::size_t nx = 0;
  std::size_t ny = 0;

  std::size_t size() const { return nx * ny; }
  Vec2 point(std::size_t i, std::size_t j) const {
    return {x0 + static_cast<double>(i) * dx, y0 + static_cast<double>(j) * dy};
  }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class GridPreset {
  kFull,      // 100 m over the whole surveillance region, 200 x 1200
  kTraining,  // 500 m over the upper half, 40 x 120
  kToy,       // 1000 m x 5000 m over the upper half, 20 x 12
};

GridSpec make_grid(const RegionSpec& region, GridPreset preset);
GridPreset parse_grid_preset(std::string_view name);
std::string_view grid_preset_name(GridPreset preset);

struct Scenario {
  std::vector<Coord> jammers;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Deployment {
  std::vector<Coord> radars;
  friend bool operator==(const Deployment&, const Deployment&) = default;
};

inline constexpr std::size_t kDefaultJammerCount = 3;
inline constexpr std::size_t kDefaultRadarCount = 4;

// Draws jammers uniformly from the integer lattice of the jam rectangle.
Scenario sample_scenario(std::uint64_t seed, const RegionSpec& region,
                         std::size_t jammer_count = kDefaultJammerCount);

struct BoundaryProjection {
  Vec2 point;
  double arclength = 0.0;
};

// The upper edge of the deploy rectangle (left to right) followed by its
// right edge (top to bottom), parameterized by unit-speed arclength.
class Boundary {
 public:
  explicit Boundary(const RegionSpec& region = RegionSpec{});

  double total_length() const { return upper_length_ + right_length_; }
  Vec2 corner() const { return {x_right_, y_top_}; }

  // Throws std::domain_error outside [0, total_length()].
  Vec2 point_at(double s) const;

  // Euclidean-nearest boundary point; ties go to the smaller arclength.
  BoundaryProjection project(const Vec2& p) const;

  // Nearest lattice point of a point lying on the boundary. The free
  // coordinate is rounded half away from zero.
  Coord snap(const Vec2& on_boundary) const;

  // Arclength of a point lying on the boundary.
  double arclength_of(const Vec2& on_boundary) const;

  bool on_lattice(const Coord& c) const;

 private:
  double x_left_;
  double x_right_;
  double y_bottom_;
  double y_top_;
  double upper_length_;
  double right_length_;
};

struct ScenarioEntry {
  std::int64_t id = 0;
  Scenario scenario;
};

// Parses `id,jx1,jy1,...`; returns nullopt for malformed lines.
std::optional<ScenarioEntry> parse_scenario_line(std::string_view line);
std::string format_scenario_line(const ScenarioEntry& entry);

struct ScenarioFile {
  std::vector<ScenarioEntry> entries;
  std::vector<std::string> warnings;  // one per skipped line
};

// Blank lines and lines starting with '#' are ignored.
ScenarioFile read_scenario_file(std::istream& in);
ScenarioFile read_scenario_file(const std::string& path);
void write_scenario_file(std::ostream& out,
                         const std::vector<ScenarioEntry>& entries);

std::vector<ScenarioEntry> generate_dataset(std::size_t count,
                                            std::uint64_t seed,
                                            const RegionSpec& region);

}  // namespace farda

#endif  // FARDA_GEOMETRY_HPP_
