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

#include "farda/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "farda/random.hpp"

namespace farda {

GridSpec make_grid(const RegionSpec& region, GridPreset preset) {
  const double y_mid = region.jam_y.lo;
  switch (preset) {
    case GridPreset::kFull:
      return {region.surveil_x.lo, region.surveil_y.lo, 100.0, 100.0, 200, 1200};
    case GridPreset::kTraining:
      return {region.surveil_x.lo, y_mid, 500.0, 500.0, 40, 120};
    case GridPreset::kToy:
      return {region.surveil_x.lo, y_mid, 1000.0, 5000.0, 20, 12};
  }
  throw std::invalid_argument("unknown grid preset");
}

GridPreset parse_grid_preset(std::string_view name) {
  if (name == "full") return GridPreset::kFull;
  if (name == "training") return GridPreset::kTraining;
  if (name == "toy") return GridPreset::kToy;
  throw std::invalid_argument("unknown grid preset: " + std::string(name));
}

std::string_view grid_preset_name(GridPreset preset) {
  switch (preset) {
    case GridPreset::kFull:
      return "full";
    case GridPreset::kTraining:
      return "training";
    case GridPreset::kToy:
      return "toy";
  }
  return "?";
}

Scenario sample_scenario(std::uint64_t seed, const RegionSpec& region,
                         std::size_t jammer_count) {
  Rng rng(seed);
  std::uniform_int_distribution<std::int64_t> ux(
      static_cast<std::int64_t>(std::ceil(region.jam_x.lo)),
      static_cast<std::int64_t>(std::floor(region.jam_x.hi)));
  std::uniform_int_distribution<std::int64_t> uy(
      static_cast<std::int64_t>(std::ceil(region.jam_y.lo)),
      static_cast<std::int64_t>(std::floor(region.jam_y.hi)));
  Scenario s;
  s.jammers.reserve(jammer_count);
  for (std::size_t i = 0; i < jammer_count; ++i) {
    const std::int64_t x = ux(rng);
    const std::int64_t y = uy(rng);
    s.jammers.push_back({x, y});
  }
  return s;
}

Boundary::Boundary(const RegionSpec& region)
    : x_left_(region.deploy_x.lo),
      x_right_(region.deploy_x.hi),
      y_bottom_(region.deploy_y.lo),
      y_top_(region.deploy_y.hi),
      upper_length_(region.deploy_x.length()),
      right_length_(region.deploy_y.length()) {}

Vec2 Boundary::point_at(double s) const {
  if (!(s >= 0.0 && s <= total_length())) {
    throw std::domain_error("arclength outside the boundary");
  }
  if (s <= upper_length_) return {x_left_ + s, y_top_};
  return {x_right_, y_top_ - (s - upper_length_)};
}

BoundaryProjection Boundary::project(const Vec2& p) const {
  const Vec2 up{std::clamp(p.x, x_left_, x_right_), y_top_};
  const Vec2 right{x_right_, std::clamp(p.y, y_bottom_, y_top_)};
  const double d_up = std::hypot(p.x - up.x, p.y - up.y);
  const double d_right = std::hypot(p.x - right.x, p.y - right.y);
  // The upper segment always carries the smaller arclength.
  if (d_up <= d_right) return {up, up.x - x_left_};
  return {right, upper_length_ + (y_top_ - right.y)};
}

Coord Boundary::snap(const Vec2& p) const {
  if (p.y == y_top_) {
    return {static_cast<std::int64_t>(std::round(p.x)),
            static_cast<std::int64_t>(std::round(y_top_))};
  }
  return {static_cast<std::int64_t>(std::round(x_right_)),
          static_cast<std::int64_t>(std::round(p.y))};
}

double Boundary::arclength_of(const Vec2& p) const {
  if (p.y == y_top_) return p.x - x_left_;
  return upper_length_ + (y_top_ - p.y);
}

bool Boundary::on_lattice(const Coord& c) const {
  const Vec2 v = c.as_vec();
  const bool on_up = v.y == y_top_ && v.x >= x_left_ && v.x <= x_right_;
  const bool on_right = v.x == x_right_ && v.y >= y_bottom_ && v.y <= y_top_;
  return on_up || on_right;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_int(std::string_view field, std::int64_t& out) {
  field = trim(field);
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::optional<ScenarioEntry> parse_scenario_line(std::string_view line) {
  line = trim(line);
  std::vector<std::int64_t> values;
  while (true) {
    const auto comma = line.find(',');
    std::int64_t v = 0;
    if (!parse_int(line.substr(0, comma), v)) return std::nullopt;
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  // id followed by at least one coordinate pair
  if (values.size() < 3 || values.size() % 2 == 0) return std::nullopt;
  ScenarioEntry entry;
  entry.id = values[0];
  for (std::size_t k = 1; k + 1 < values.size(); k += 2) {
    entry.scenario.jammers.push_back({values[k], values[k + 1]});
  }
  return entry;
}

std::string format_scenario_line(const ScenarioEntry& entry) {
  std::string line = std::to_string(entry.id);
  for (const Coord& j : entry.scenario.jammers) {
    line += ',';
    line += std::to_string(j.x);
    line += ',';
    line += std::to_string(j.y);
  }
  return line;
}

ScenarioFile read_scenario_file(std::istream& in) {
  ScenarioFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (auto entry = parse_scenario_line(t)) {
      file.entries.push_back(std::move(*entry));
    } else {
      file.warnings.push_back("line " + std::to_string(line_no) +
                              ": malformed scenario: " + std::string(t));
    }
  }
  return file;
}

ScenarioFile read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return read_scenario_file(in);
}

void write_scenario_file(std::ostream& out,
                         const std::vector<ScenarioEntry>& entries) {
  for (const auto& e : entries) out << format_scenario_line(e) << '\n';
}

std::vector<ScenarioEntry> generate_dataset(std::size_t count,
                                            std::uint64_t seed,
                                            const RegionSpec& region) {
  std::vector<ScenarioEntry> entries;
  entries.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    entries.push_back({static_cast<std::int64_t>(k),
                       sample_scenario(mix_seed(seed, k), region)});
  }
  return entries;
}

}  // namespace farda
