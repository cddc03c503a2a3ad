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

// Sequential radar-deployment environment on a sampling grid, with the
// thresholded heatmap channel and shaped rewards (constraint-violation
// penalty plus exponential coverage reward).

#ifndef FARDA_ENV_HPP_
#define FARDA_ENV_HPP_

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "farda/detection.hpp"
#include "farda/geometry.hpp"

namespace farda {

enum class CvdpMode {
  kVerbatim,  // 0 / u - 3d / u - d, discontinuous at u and 1.5u
  kMonotone,  // continuous, nonincreasing in d
};

// d = |anchor - a_s| in normalized arclength.
double cvdp_penalty(double anchor, double tolerance, double a_s,
                    CvdpMode mode = CvdpMode::kVerbatim);

// (10^r - 10^r_prev) / 10
double expr_reward(double r, double r_prev);

inline double shaped_reward(double expr, double penalty) {
  return expr + penalty;
}

// 1 where value >= tau, else 0.
Heatmap augment_channel(const Heatmap& heatmap, double tau);

struct RewardShaper {
  std::vector<double> anchors;     // normalized arclength, increasing
  std::vector<double> thresholds;  // normalized arclength, positive
  CvdpMode mode = CvdpMode::kVerbatim;

  // anchors (t + 0.5) / n, thresholds 1 / (2n)
  static RewardShaper uniform(std::size_t radar_count);

  double penalty(std::size_t t, double a_s) const {
    return cvdp_penalty(anchors.at(t), thresholds.at(t), a_s, mode);
  }
};

struct EnvConfig {
  PhysicsParams physics;
  RegionSpec region;
  GridSpec grid;
  std::size_t radar_count = kDefaultRadarCount;
  RewardShaper shaper = RewardShaper::uniform(kDefaultRadarCount);

  static EnvConfig for_preset(GridPreset preset,
                              const PhysicsParams& physics = PhysicsParams{});
};

struct EnvState {
  Heatmap heatmap;          // detection of the radars deployed so far
  Scenario scenario;
  Deployment deployment;    // snapped radars, in deployment order
  std::vector<double> history;  // 2|R| normalized coordinates, zero padded
  std::vector<double> turn;     // one-hot of length |R|; all zero at the end
  std::size_t t = 0;
  double prev_coverage = 0.0;
};

struct StepResult {
  EnvState next;
  double raw_reward = 0.0;  // coverage of the grid after this step
  double expr = 0.0;
  double penalty = 0.0;
  double shaped = 0.0;
  Coord radar;              // snapped position
  double arclength = 0.0;   // normalized arclength of `radar`
  bool terminal = false;
};

struct Transition {
  EnvState state;
  Vec2 action;
  double shaped_reward = 0.0;
  EnvState next;
  bool terminal = false;
};

class DeployEnv {
 public:
  explicit DeployEnv(EnvConfig config);

  const EnvConfig& config() const { return config_; }
  const Boundary& boundary() const { return boundary_; }
  std::size_t horizon() const { return config_.radar_count; }

  EnvState reset(const Scenario& scenario) const;

  // `action` is a normalized point of the deploy rectangle; values outside
  // [0, 1] are clamped. Throws std::logic_error past the final step.
  StepResult step(const EnvState& state, const Vec2& action) const;

  // Jammers normalized by the jam rectangle, interleaved x, y.
  std::vector<double> normalized_jammers(const Scenario& scenario) const;
  Vec2 action_to_world(const Vec2& action) const;
  Vec2 world_to_action(const Vec2& p) const;

 private:
  EnvConfig config_;
  Boundary boundary_;
};

// Episode trace: t,action_x,action_y,radar_x,radar_y,raw_reward,shaped_reward
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, std::size_t t, const Vec2& action,
                     const StepResult& step);

}  // namespace farda

#endif  // FARDA_ENV_HPP_
