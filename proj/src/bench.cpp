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

#include "farda/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "farda/ppo.hpp"

namespace farda {

double efficiency(double coverage, double seconds) {
  if (!(seconds > 0.0)) {
    throw std::domain_error("efficiency: time must be positive");
  }
  return coverage / std::log1p(seconds);
}

Category categorize(double ga1d_coverage, double pso1d_coverage) {
  if (ga1d_coverage < 0.9 && pso1d_coverage < 0.9) return Category::kBad;
  if (ga1d_coverage >= 0.95 && pso1d_coverage >= 0.95) return Category::kGood;
  return Category::kNormal;
}

std::string_view category_name(Category category) {
  switch (category) {
    case Category::kBad:
      return "bad";
    case Category::kNormal:
      return "normal";
    case Category::kGood:
      return "good";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "ga") return Method::kGa;
  if (name == "pso") return Method::kPso;
  if (name == "ga1d") return Method::kGa1d;
  if (name == "pso1d") return Method::kPso1d;
  if (name == "farda") return Method::kFarda;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kGa:
      return "ga";
    case Method::kPso:
      return "pso";
    case Method::kGa1d:
      return "ga1d";
    case Method::kPso1d:
      return "pso1d";
    case Method::kFarda:
      return "farda";
  }
  return "unknown";
}

void write_records_csv(std::ostream& out,
                       const std::vector<BenchRecord>& records) {
  std::size_t radars = 0;
  for (const auto& r : records) {
    radars = std::max(radars, r.deployment.radars.size());
  }
  out << "id,method,coverage,wall_time_seconds";
  for (std::size_t k = 1; k <= radars; ++k) out << ",r" << k << "x,r" << k << "y";
  out << '\n';
  char buf[64];
  for (const auto& r : records) {
    out << r.id << ',' << r.method << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.coverage, r.wall_time);
    out << buf;
    for (const auto& c : r.deployment.radars) out << ',' << c.x << ',' << c.y;
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::int64_t to_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

}  // namespace

std::vector<BenchRecord> read_records_csv(std::istream& in) {
  std::vector<BenchRecord> records;
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("id,", 0) == 0) continue;
    }
    const auto f = split(line, ',');
    if (f.size() < 4 || (f.size() - 4) % 2 != 0) {
      throw std::runtime_error("records line " + std::to_string(lineno) +
                               ": wrong field count");
    }
    BenchRecord r;
    try {
      r.id = to_int(f[0]);
      r.method = f[1];
      r.coverage = to_double(f[2]);
      r.wall_time = to_double(f[3]);
      for (std::size_t k = 4; k < f.size(); k += 2) {
        if (f[k].empty() && f[k + 1].empty()) continue;
        r.deployment.radars.push_back({to_int(f[k]), to_int(f[k + 1])});
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("records line " + std::to_string(lineno) +
                               ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<BenchRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file: " + path);
  return read_records_csv(in);
}

BenchRecord solve_scenario(Method method, const ScenarioEntry& entry,
                           const BenchConfig& config, std::uint64_t seed,
                           const Agent* agent) {
  BenchRecord record;
  record.id = entry.id;
  record.method = std::string(method_name(method));
  const GridSpec full = make_grid(config.region, GridPreset::kFull);

  if (method == Method::kFarda) {
    if (agent == nullptr) {
      throw std::invalid_argument("method farda needs a checkpoint");
    }
    const DeployResult r = deploy(*agent, entry.scenario, config.physics);
    record.deployment = r.deployment;
    record.wall_time = r.wall_time;
    record.coverage = r.coverage;
    return record;
  }

  const bool boundary = method == Method::kGa1d || method == Method::kPso1d;
  const DecisionDomain domain =
      boundary ? boundary_domain(config.region, config.radar_count)
               : region_domain(config.region, config.radar_count);
  const GridSpec solve_grid = make_grid(config.region, config.solve_grid);
  const FitnessFn fitness = [&](std::span<const double> x) {
    return deployment_coverage(config.physics, domain.decode(x),
                               entry.scenario, solve_grid);
  };
  const bool ga = method == Method::kGa || method == Method::kGa1d;
  const SolveResult r = ga ? ga_solve(config.ga, fitness, domain, seed)
                           : pso_solve(config.pso, fitness, domain, seed);
  record.deployment = domain.decode(r.best_position);
  record.wall_time = r.wall_time;
  record.coverage = deployment_coverage(config.physics, record.deployment,
                                        entry.scenario, full);
  return record;
}

BenchRun run_bench(const std::vector<ScenarioEntry>& entries, Method method,
                   const BenchConfig& config, std::uint64_t seed,
                   const Agent* agent) {
  if (method == Method::kFarda && agent == nullptr) {
    throw std::invalid_argument("method farda needs a checkpoint");
  }
  BenchRun run;
  run.records.resize(entries.size());
  std::size_t threads = config.threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : config.threads;
  threads = std::min(threads, std::max<std::size_t>(entries.size(), 1));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](std::size_t w) {
    try {
      for (std::size_t k = next++; k < entries.size(); k = next++) {
        const std::uint64_t s =
            seed ^ static_cast<std::uint64_t>(entries[k].id);
        run.records[k] = solve_scenario(method, entries[k], config, s, agent);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next = entries.size();
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return run;
}

BenchRun run_bench(const std::string& dataset_path, Method method,
                   const BenchConfig& config, std::uint64_t seed,
                   const Agent* agent) {
  const ScenarioFile file = read_scenario_file(dataset_path);
  BenchRun run = run_bench(file.entries, method, config, seed, agent);
  run.warnings = file.warnings;
  return run;
}

Deployment uniform_anchor_deployment(const RegionSpec& region,
                                     std::size_t radar_count) {
  const Boundary boundary(region);
  Deployment d;
  for (std::size_t t = 0; t < radar_count; ++t) {
    const double s = (static_cast<double>(t) + 0.5) /
                     static_cast<double>(radar_count) * boundary.total_length();
    d.radars.push_back(boundary.snap(boundary.point_at(s)));
  }
  return d;
}

double improvement_ratio(double value, double reference) {
  if (reference == 0.0) {
    throw std::domain_error("improvement ratio: zero reference");
  }
  return (value - reference) / reference;
}

namespace {

std::vector<MethodSummary> summarize(
    const std::vector<const BenchRecord*>& records,
    const std::string& reference) {
  std::vector<MethodSummary> out;
  auto find = [&](const std::string& m) -> MethodSummary& {
    for (auto& s : out) {
      if (s.method == m) return s;
    }
    out.push_back({m, 0, 0.0, 0.0, 0.0, std::nullopt});
    return out.back();
  };
  for (const BenchRecord* r : records) {
    MethodSummary& s = find(r->method);
    ++s.count;
    s.mean_coverage += r->coverage;
    s.mean_time += r->wall_time;
    s.mean_efficiency += efficiency(r->coverage, r->wall_time);
  }
  for (auto& s : out) {
    const double n = static_cast<double>(s.count);
    s.mean_coverage /= n;
    s.mean_time /= n;
    s.mean_efficiency /= n;
  }
  const MethodSummary* ref = nullptr;
  for (const auto& s : out) {
    if (s.method == reference) ref = &s;
  }
  if (ref != nullptr && ref->mean_coverage != 0.0) {
    const double base = ref->mean_coverage;
    for (auto& s : out) s.improvement = improvement_ratio(s.mean_coverage, base);
  }
  return out;
}

}  // namespace

MetricsReport make_report(const std::vector<BenchRecord>& records,
                          const std::string& reference_method) {
  if (records.empty()) throw std::invalid_argument("report: no records");
  MetricsReport report;
  report.reference_method = reference_method;

  std::vector<const BenchRecord*> all;
  std::map<std::int64_t, std::map<std::string, double>> by_id;
  for (const auto& r : records) {
    all.push_back(&r);
    by_id[r.id][r.method] = r.coverage;
  }
  report.overall = summarize(all, reference_method);

  std::map<std::int64_t, Category> category_of;
  for (const auto& [id, methods] : by_id) {
    const auto g = methods.find("ga1d");
    const auto p = methods.find("pso1d");
    if (g == methods.end() || p == methods.end()) return report;
    category_of[id] = categorize(g->second, p->second);
  }
  for (Category c : {Category::kBad, Category::kNormal, Category::kGood}) {
    CategorySummary cs;
    cs.category = c;
    std::vector<const BenchRecord*> subset;
    for (const auto& r : records) {
      if (category_of.at(r.id) == c) subset.push_back(&r);
    }
    for (const auto& [id, cat] : category_of) {
      if (cat == c) ++cs.scenarios;
    }
    if (!subset.empty()) cs.methods = summarize(subset, reference_method);
    report.categories.push_back(std::move(cs));
  }
  return report;
}

namespace {

void write_csv_rows(std::ostream& out, const std::string& section,
                    std::size_t scenarios,
                    const std::vector<MethodSummary>& rows) {
  char buf[160];
  for (const auto& s : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g", s.mean_coverage,
                  s.mean_time, s.mean_efficiency);
    out << section << ',' << scenarios << ',' << s.method << ',' << s.count
        << ',' << buf << ',';
    if (s.improvement) {
      std::snprintf(buf, sizeof buf, "%.10g", *s.improvement);
      out << buf;
    }
    out << '\n';
  }
}

std::size_t distinct_ids(const std::vector<MethodSummary>& rows) {
  std::size_t n = 0;
  for (const auto& s : rows) n = std::max(n, s.count);
  return n;
}

}  // namespace

void write_report_csv(std::ostream& out, const MetricsReport& report) {
  out << "section,scenarios,method,count,mean_coverage,mean_time,"
         "mean_efficiency,improvement_ratio\n";
  write_csv_rows(out, "overall", distinct_ids(report.overall), report.overall);
  for (const auto& c : report.categories) {
    write_csv_rows(out, std::string(category_name(c.category)), c.scenarios,
                   c.methods);
  }
}

void write_report_text(std::ostream& out, const MetricsReport& report) {
  char buf[200];
  auto table = [&](const std::vector<MethodSummary>& rows) {
    std::snprintf(buf, sizeof buf, "  %-8s %6s %10s %12s %11s %12s\n",
                  "method", "n", "coverage%", "time_s", "efficiency",
                  "improvement");
    out << buf;
    for (const auto& s : rows) {
      char imp[32] = "-";
      if (s.improvement) {
        std::snprintf(imp, sizeof imp, "%+.2f%%", 100.0 * *s.improvement);
      }
      std::snprintf(buf, sizeof buf, "  %-8s %6zu %10.2f %12.4f %11.4f %12s\n",
                    s.method.c_str(), s.count, 100.0 * s.mean_coverage,
                    s.mean_time, s.mean_efficiency, imp);
      out << buf;
    }
  };
  out << "overall";
  if (!report.reference_method.empty()) {
    out << " (reference: " << report.reference_method << ")";
  }
  out << '\n';
  table(report.overall);
  for (const auto& c : report.categories) {
    out << category_name(c.category) << " (" << c.scenarios
        << " scenarios)\n";
    table(c.methods);
  }
}

Heatmap export_heatmap(const PhysicsParams& physics, const Scenario& scenario,
                       const Deployment& deployment, const GridSpec& grid,
                       const std::string& path) {
  const Heatmap heatmap = compute_heatmap(physics, deployment, scenario, grid);
  const bool pgm =
      path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0;
  if (pgm) {
    write_heatmap_pgm(heatmap, path);
  } else {
    write_heatmap_csv(heatmap, path);
  }
  std::ofstream side(path + ".txt");
  if (!side) throw std::runtime_error("cannot write " + path + ".txt");
  side << "# grid x0=" << grid.x0 << " y0=" << grid.y0 << " dx=" << grid.dx
       << " dy=" << grid.dy << " nx=" << grid.nx << " ny=" << grid.ny << '\n';
  side << "kind,index,x,y\n";
  for (std::size_t k = 0; k < deployment.radars.size(); ++k) {
    side << "radar," << k + 1 << ',' << deployment.radars[k].x << ','
         << deployment.radars[k].y << '\n';
  }
  for (std::size_t k = 0; k < scenario.jammers.size(); ++k) {
    side << "jammer," << k + 1 << ',' << scenario.jammers[k].x << ','
         << scenario.jammers[k].y << '\n';
  }
  if (!side) throw std::runtime_error("write failed: " + path + ".txt");
  return heatmap;
}

Deployment parse_radar_list(std::string_view text) {
  Deployment d;
  if (text.empty()) return d;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto xy = split(item, ',');
    if (xy.size() != 2) {
      throw std::invalid_argument("radar list entries are x,y: " + item);
    }
    d.radars.push_back({to_int(xy[0]), to_int(xy[1])});
  }
  return d;
}

}  // namespace farda
