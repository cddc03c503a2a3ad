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

// Benchmark orchestration: solver runs over a scenario dataset, metrics,
// categorization, report aggregation and heatmap export.

#ifndef FARDA_BENCH_HPP_
#define FARDA_BENCH_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "farda/detection.hpp"
#include "farda/evo.hpp"
#include "farda/geometry.hpp"

namespace farda {

struct Agent;

// coverage / ln(1 + seconds). Throws std::domain_error for time <= 0.
double efficiency(double coverage, double seconds);

enum class Category { kBad, kNormal, kGood };

// Bad when both are below 0.9, Good when both reach 0.95, else Normal.
Category categorize(double ga1d_coverage, double pso1d_coverage);
std::string_view category_name(Category category);

enum class Method { kGa, kPso, kGa1d, kPso1d, kFarda };

Method parse_method(std::string_view name);
std::string_view method_name(Method method);

struct BenchRecord {
  std::int64_t id = 0;
  std::string method;
  double coverage = 0.0;   // on the full 100 m grid
  double wall_time = 0.0;  // seconds, solve call only
  Deployment deployment;
};

// id,method,coverage,wall_time_seconds,r1x,r1y,...,rNx,rNy
void write_records_csv(std::ostream& out,
                       const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_records_csv(std::istream& in);
std::vector<BenchRecord> read_records_csv(const std::string& path);

struct BenchConfig {
  PhysicsParams physics;
  RegionSpec region;
  GAConfig ga;
  PSOConfig pso;
  GridPreset solve_grid = GridPreset::kTraining;
  std::size_t radar_count = kDefaultRadarCount;
  std::size_t threads = 1;  // 0: hardware concurrency
};

// One scenario, one method. The agent is required for Method::kFarda.
BenchRecord solve_scenario(Method method, const ScenarioEntry& entry,
                           const BenchConfig& config, std::uint64_t seed,
                           const Agent* agent = nullptr);

struct BenchRun {
  std::vector<BenchRecord> records;  // scenario-file order
  std::vector<std::string> warnings;
};

// Scenario k runs with seed ^ id. Records keep the input order whatever the
// thread count.
BenchRun run_bench(const std::vector<ScenarioEntry>& entries, Method method,
                   const BenchConfig& config, std::uint64_t seed,
                   const Agent* agent = nullptr);
BenchRun run_bench(const std::string& dataset_path, Method method,
                   const BenchConfig& config, std::uint64_t seed,
                   const Agent* agent = nullptr);

// Radars at the centers of |R| equal boundary segments.
Deployment uniform_anchor_deployment(const RegionSpec& region,
                                     std::size_t radar_count);

// (value - reference) / reference
double improvement_ratio(double value, double reference);

struct MethodSummary {
  std::string method;
  std::size_t count = 0;
  double mean_coverage = 0.0;
  double mean_time = 0.0;
  double mean_efficiency = 0.0;
  std::optional<double> improvement;  // over the reference method
};

struct CategorySummary {
  Category category = Category::kNormal;
  std::size_t scenarios = 0;
  std::vector<MethodSummary> methods;
};

struct MetricsReport {
  std::string reference_method;
  std::vector<MethodSummary> overall;
  // Present only when every scenario has both ga1d and pso1d records.
  std::vector<CategorySummary> categories;
};

// Throws std::invalid_argument on an empty record set.
MetricsReport make_report(const std::vector<BenchRecord>& records,
                          const std::string& reference_method = "");

// section,scenarios,method,count,mean_coverage,mean_time,mean_efficiency,
// improvement_ratio
void write_report_csv(std::ostream& out, const MetricsReport& report);
void write_report_text(std::ostream& out, const MetricsReport& report);

// Writes a graymap when `path` ends in ".pgm", CSV otherwise, plus
// `path + ".txt"` listing the radar and jammer coordinates.
Heatmap export_heatmap(const PhysicsParams& physics, const Scenario& scenario,
                       const Deployment& deployment, const GridSpec& grid,
                       const std::string& path);

// Parses "x1,y1;x2,y2;..." into lattice coordinates.
Deployment parse_radar_list(std::string_view text);

}  // namespace farda

#endif  // FARDA_BENCH_HPP_
