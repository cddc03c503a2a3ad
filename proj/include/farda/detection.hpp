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

// Detection-probability model: relative geometry, received powers, noise,
// SINR with the angular jamming gate, per-radar detection probability,
// multi-radar fusion, heatmaps and coverage.

#ifndef FARDA_DETECTION_HPP_
#define FARDA_DETECTION_HPP_

#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "farda/geometry.hpp"

namespace farda {

class DegenerateGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PhysicsParams {
  double radar_tx_power = 450.0;           // W
  double jammer_tx_power = 30.0;           // W
  double wavelength = 0.3;                 // m
  double array_elements = 32.0;            // K
  double bandwidth = 1e6;                  // Hz
  double pulse_rate = 2e3;                 // Hz
  double room_temp = 270.0;                // K
  double false_alarm = 1e-3;
  double noise_factor = 1.9952623149688795;  // 10^0.3
  double pulses = 16.0;                    // N
  // m. Half a wavelength is the textbook choice but leaves jamming
  // negligible at these ranges (every layout covers the whole region);
  // this value puts optimized layouts near 93% coverage.
  double element_spacing = 0.004;
  double boltzmann = 1.38e-23;             // J/K
  double threshold = 0.5;                  // tau

  double tx_gain() const {
    return 2.0 * std::numbers::pi * element_spacing * (pulses - 1.0) /
           wavelength;
  }
  double rx_gain() const {
    return 2.0 * std::numbers::pi * element_spacing / wavelength;
  }
  double angle_gate() const { return 2.0 * 0.886 / pulses; }

  // Throws std::invalid_argument when a constant is out of range.
  void validate() const;
};

struct RelativeGeometry {
  double distance = 0.0;
  double angle = 0.0;  // [0, 2*pi)
};

// Distance and bearing of `from` seen from `to` (delta = from - to).
RelativeGeometry relative_geometry(const Vec2& from, const Vec2& to);

struct SignalPowers {
  double echo = 0.0;    // P_r
  double jammer = 0.0;  // P_j
};

SignalPowers signal_powers(const PhysicsParams& params, double target_range,
                           double jammer_range);
double echo_power(const PhysicsParams& params, double target_range);
double jammer_power(const PhysicsParams& params, double jammer_range);
double noise_power(const PhysicsParams& params);

// Circular distance between two bearings, in [0, pi].
double angular_distance(double a, double b);

// Returns +inf when the point coincides with the radar.
double sinr_at_point(const PhysicsParams& params, const Vec2& radar,
                     std::span<const Coord> jammers, const Vec2& point);

// Pr_fa^(1 / (1 + sinr)); throws std::domain_error for negative sinr.
double detection_prob(const PhysicsParams& params, double sinr);

double fuse_radars(std::span<const double> probs);

struct Heatmap {
  GridSpec grid;
  std::vector<double> values;  // row-major, see GridSpec::index

  double at(std::size_t i, std::size_t j) const {
    return values[grid.index(i, j)];
  }
};

Heatmap compute_heatmap(const PhysicsParams& params,
                        const Deployment& deployment, const Scenario& scenario,
                        const GridSpec& grid);

// Fraction of values >= tau.
double coverage(const Heatmap& heatmap, double tau);

// Same value as coverage(compute_heatmap(...), params.threshold) without
// materializing the heatmap.
double deployment_coverage(const PhysicsParams& params,
                           const Deployment& deployment,
                           const Scenario& scenario, const GridSpec& grid);

// ny rows by nx columns, row j holding y = y0 + j*dy, 6 decimals.
void write_heatmap_csv(const Heatmap& heatmap, const std::string& path);
std::vector<double> read_heatmap_csv(const std::string& path,
                                     std::size_t* rows = nullptr,
                                     std::size_t* cols = nullptr);
// Binary graymap (P5); first row is the largest y.
void write_heatmap_pgm(const Heatmap& heatmap, const std::string& path);
unsigned char graymap_level(double prob);

}  // namespace farda

#endif  // FARDA_DETECTION_HPP_
