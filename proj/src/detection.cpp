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

#include "farda/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace farda {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GatedJammer {
  double angle;
  double power;
};

// Per-radar quantities that do not depend on the evaluated point.
struct RadarContext {
  Vec2 pos;
  std::vector<GatedJammer> jammers;
};

RadarContext make_context(const PhysicsParams& params, const Vec2& radar,
                          std::span<const Coord> jammers) {
  RadarContext ctx{radar, {}};
  ctx.jammers.reserve(jammers.size());
  for (const Coord& j : jammers) {
    const Vec2 jv = j.as_vec();
    if (jv == radar) continue;  // no bearing; excluded from the gate
    const RelativeGeometry g = relative_geometry(radar, jv);
    ctx.jammers.push_back({g.angle, jammer_power(params, g.distance)});
  }
  return ctx;
}

struct PointConstants {
  double gate;
  double noise;

  explicit PointConstants(const PhysicsParams& p)
      : gate(p.angle_gate()), noise(noise_power(p)) {}
};

double context_sinr(const PhysicsParams& params, const PointConstants& k,
                    const RadarContext& ctx, const Vec2& point) {
  if (ctx.pos == point) return std::numeric_limits<double>::infinity();
  const RelativeGeometry g = relative_geometry(ctx.pos, point);
  const double echo = echo_power(params, g.distance);
  double interference = 0.0;
  bool gated = false;
  for (const GatedJammer& j : ctx.jammers) {
    if (angular_distance(j.angle, g.angle) <= k.gate) {
      interference += j.power;
      gated = true;
    }
  }
  return gated ? echo / interference : echo / k.noise;
}

// Fused detection probability at one point; `scratch` holds one slot per
// radar.
double fused_at_point(const PhysicsParams& params, const PointConstants& k,
                      std::span<const RadarContext> radars, const Vec2& point,
                      std::span<double> scratch) {
  for (std::size_t r = 0; r < radars.size(); ++r) {
    scratch[r] = detection_prob(params, context_sinr(params, k, radars[r], point));
  }
  return fuse_radars(scratch.subspan(0, radars.size()));
}

std::vector<RadarContext> make_contexts(const PhysicsParams& params,
                                        const Deployment& deployment,
                                        const Scenario& scenario) {
  std::vector<RadarContext> contexts;
  contexts.reserve(deployment.radars.size());
  for (const Coord& r : deployment.radars) {
    contexts.push_back(make_context(params, r.as_vec(), scenario.jammers));
  }
  return contexts;
}

}  // namespace

void PhysicsParams::validate() const {
  const bool positive = radar_tx_power > 0 && jammer_tx_power > 0 &&
                        wavelength > 0 && array_elements > 0 &&
                        bandwidth > 0 && pulse_rate > 0 && room_temp > 0 &&
                        noise_factor > 0 && pulses > 1 &&
                        element_spacing > 0 && boltzmann > 0;
  if (!positive) {
    throw std::invalid_argument("physics constants must be strictly positive");
  }
  if (!(false_alarm > 0 && false_alarm < 1)) {
    throw std::invalid_argument("false alarm probability must be in (0, 1)");
  }
  if (!(threshold > 0 && threshold < 1)) {
    throw std::invalid_argument("detection threshold must be in (0, 1)");
  }
}

RelativeGeometry relative_geometry(const Vec2& from, const Vec2& to) {
  const double dx = from.x - to.x;
  const double dy = from.y - to.y;
  const double r = std::sqrt(dx * dx + dy * dy);
  if (r == 0.0) throw DegenerateGeometry("coincident points");
  const double a = std::acos(std::clamp(dx / r, -1.0, 1.0));
  double angle = from.y > to.y ? a : kTwoPi - a;
  if (angle >= kTwoPi) angle = 0.0;
  return {r, angle};
}

double echo_power(const PhysicsParams& p, double range) {
  if (!(range > 0.0)) throw DegenerateGeometry("zero target range");
  const double four_pi = 4.0 * kPi;
  const double k = p.array_elements;
  const double b = p.bandwidth;
  const double r2 = range * range;
  return p.radar_tx_power * p.tx_gain() * p.rx_gain() * p.wavelength *
         p.wavelength * k * k * b * b /
         (four_pi * four_pi * four_pi * r2 * r2);
}

double jammer_power(const PhysicsParams& p, double range) {
  if (!(range > 0.0)) throw DegenerateGeometry("zero jammer range");
  const double four_pi = 4.0 * kPi;
  return p.jammer_tx_power * p.wavelength * p.wavelength * p.array_elements *
         p.bandwidth / (four_pi * four_pi * range * range * p.pulse_rate);
}

SignalPowers signal_powers(const PhysicsParams& params, double target_range,
                           double jammer_range) {
  return {echo_power(params, target_range), jammer_power(params, jammer_range)};
}

double noise_power(const PhysicsParams& p) {
  return p.boltzmann * p.room_temp * p.array_elements * p.bandwidth *
         p.bandwidth * p.noise_factor / p.pulse_rate;
}

double angular_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, kTwoPi - d);
}

double sinr_at_point(const PhysicsParams& params, const Vec2& radar,
                     std::span<const Coord> jammers, const Vec2& point) {
  const RadarContext ctx = make_context(params, radar, jammers);
  return context_sinr(params, PointConstants(params), ctx, point);
}

double detection_prob(const PhysicsParams& params, double sinr) {
  if (!(sinr >= 0.0)) throw std::domain_error("negative SINR");
  return std::pow(params.false_alarm, 1.0 / (1.0 + sinr));
}

double fuse_radars(std::span<const double> probs) {
  // Multiplying survival terms in sorted order makes the result independent
  // of radar order bit for bit.
  constexpr std::size_t kInline = 16;
  double inline_buf[kInline];
  std::vector<double> heap;
  std::span<double> survival;
  if (probs.size() <= kInline) {
    survival = std::span<double>(inline_buf, probs.size());
  } else {
    heap.resize(probs.size());
    survival = heap;
  }
  for (std::size_t i = 0; i < probs.size(); ++i) survival[i] = 1.0 - probs[i];
  std::sort(survival.begin(), survival.end());
  double prod = 1.0;
  for (double s : survival) prod *= s;
  return 1.0 - prod;
}

Heatmap compute_heatmap(const PhysicsParams& params,
                        const Deployment& deployment, const Scenario& scenario,
                        const GridSpec& grid) {
  Heatmap h{grid, std::vector<double>(grid.size(), 0.0)};
  if (deployment.radars.empty()) return h;
  const PointConstants k(params);
  const auto contexts = make_contexts(params, deployment, scenario);
  std::vector<double> scratch(contexts.size());
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      h.values[grid.index(i, j)] =
          fused_at_point(params, k, contexts, grid.point(i, j), scratch);
    }
  }
  return h;
}

double coverage(const Heatmap& heatmap, double tau) {
  if (heatmap.values.empty()) return 0.0;
  const auto hit = std::count_if(heatmap.values.begin(), heatmap.values.end(),
                                 [tau](double v) { return v >= tau; });
  return static_cast<double>(hit) / static_cast<double>(heatmap.values.size());
}

double deployment_coverage(const PhysicsParams& params,
                           const Deployment& deployment,
                           const Scenario& scenario, const GridSpec& grid) {
  if (grid.size() == 0 || deployment.radars.empty()) return 0.0;
  const PointConstants k(params);
  const auto contexts = make_contexts(params, deployment, scenario);
  std::vector<double> scratch(contexts.size());
  std::size_t hit = 0;
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      if (fused_at_point(params, k, contexts, grid.point(i, j), scratch) >=
          params.threshold) {
        ++hit;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(grid.size());
}

void write_heatmap_csv(const Heatmap& heatmap, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[32];
  for (std::size_t j = 0; j < heatmap.grid.ny; ++j) {
    for (std::size_t i = 0; i < heatmap.grid.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%.6f", heatmap.at(i, j));
      if (i) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_heatmap_csv(const std::string& path,
                                     std::size_t* rows, std::size_t* cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> values;
  std::string line;
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t c = 0;
    while (std::getline(ss, field, ',')) {
      values.push_back(std::stod(field));
      ++c;
    }
    if (nrows == 0) ncols = c;
    if (c != ncols) throw std::runtime_error("ragged heatmap CSV: " + path);
    ++nrows;
  }
  if (rows) *rows = nrows;
  if (cols) *cols = ncols;
  return values;
}

unsigned char graymap_level(double prob) {
  const double clamped = std::clamp(prob, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(255.0 * clamped));
}

void write_heatmap_pgm(const Heatmap& heatmap, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << heatmap.grid.nx << ' ' << heatmap.grid.ny << "\n255\n";
  std::vector<unsigned char> row(heatmap.grid.nx);
  for (std::size_t r = 0; r < heatmap.grid.ny; ++r) {
    const std::size_t j = heatmap.grid.ny - 1 - r;
    for (std::size_t i = 0; i < heatmap.grid.nx; ++i) {
      row[i] = graymap_level(heatmap.at(i, j));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace farda
