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

#include "farda/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace farda {

double cvdp_penalty(double anchor, double tolerance, double a_s,
                    CvdpMode mode) {
  const double d = std::fabs(anchor - a_s);
  if (d <= tolerance) return 0.0;
  if (mode == CvdpMode::kVerbatim) {
    if (d <= 1.5 * tolerance) return tolerance - 3.0 * d;
    return tolerance - d;
  }
  if (d <= 1.5 * tolerance) return 3.0 * (tolerance - d);
  return -1.5 * tolerance - (d - 1.5 * tolerance);
}

double expr_reward(double r, double r_prev) {
  return (std::pow(10.0, r) - std::pow(10.0, r_prev)) / 10.0;
}

Heatmap augment_channel(const Heatmap& heatmap, double tau) {
  Heatmap out{heatmap.grid, std::vector<double>(heatmap.values.size())};
  std::transform(heatmap.values.begin(), heatmap.values.end(),
                 out.values.begin(),
                 [tau](double v) { return v >= tau ? 1.0 : 0.0; });
  return out;
}

RewardShaper RewardShaper::uniform(std::size_t radar_count) {
  RewardShaper shaper;
  const double n = static_cast<double>(radar_count);
  for (std::size_t t = 0; t < radar_count; ++t) {
    shaper.anchors.push_back((static_cast<double>(t) + 0.5) / n);
    shaper.thresholds.push_back(1.0 / (2.0 * n));
  }
  return shaper;
}

EnvConfig EnvConfig::for_preset(GridPreset preset,
                                const PhysicsParams& physics) {
  EnvConfig config;
  config.physics = physics;
  config.grid = make_grid(config.region, preset);
  return config;
}

DeployEnv::DeployEnv(EnvConfig config)
    : config_(std::move(config)), boundary_(config_.region) {
  config_.physics.validate();
  if (config_.shaper.anchors.size() != config_.radar_count ||
      config_.shaper.thresholds.size() != config_.radar_count) {
    throw std::invalid_argument("reward shaper does not match radar count");
  }
}

EnvState DeployEnv::reset(const Scenario& scenario) const {
  EnvState s;
  s.heatmap = Heatmap{config_.grid, std::vector<double>(config_.grid.size(), 0.0)};
  s.scenario = scenario;
  s.history.assign(2 * config_.radar_count, 0.0);
  s.turn.assign(config_.radar_count, 0.0);
  if (!s.turn.empty()) s.turn[0] = 1.0;
  return s;
}

Vec2 DeployEnv::action_to_world(const Vec2& a) const {
  const auto& r = config_.region;
  return {r.deploy_x.lo + std::clamp(a.x, 0.0, 1.0) * r.deploy_x.length(),
          r.deploy_y.lo + std::clamp(a.y, 0.0, 1.0) * r.deploy_y.length()};
}

Vec2 DeployEnv::world_to_action(const Vec2& p) const {
  const auto& r = config_.region;
  return {(p.x - r.deploy_x.lo) / r.deploy_x.length(),
          (p.y - r.deploy_y.lo) / r.deploy_y.length()};
}

std::vector<double> DeployEnv::normalized_jammers(
    const Scenario& scenario) const {
  const auto& r = config_.region;
  std::vector<double> out;
  out.reserve(2 * scenario.jammers.size());
  for (const Coord& j : scenario.jammers) {
    out.push_back((static_cast<double>(j.x) - r.jam_x.lo) / r.jam_x.length());
    out.push_back((static_cast<double>(j.y) - r.jam_y.lo) / r.jam_y.length());
  }
  return out;
}

StepResult DeployEnv::step(const EnvState& state, const Vec2& action) const {
  if (state.t >= config_.radar_count) {
    throw std::logic_error("step called on a terminal state");
  }
  if (!std::isfinite(action.x) || !std::isfinite(action.y)) {
    throw std::invalid_argument("non-finite action");
  }
  const BoundaryProjection proj = boundary_.project(action_to_world(action));
  const Coord radar = boundary_.snap(proj.point);
  const double s = boundary_.arclength_of(radar.as_vec()) /
                   boundary_.total_length();

  StepResult out;
  out.radar = radar;
  out.arclength = s;
  EnvState& next = out.next;
  next.scenario = state.scenario;
  next.deployment = state.deployment;
  next.deployment.radars.push_back(radar);
  next.heatmap = compute_heatmap(config_.physics, next.deployment,
                                 state.scenario, config_.grid);
  next.history = state.history;
  const Vec2 a = world_to_action(radar.as_vec());
  next.history[2 * state.t] = a.x;
  next.history[2 * state.t + 1] = a.y;
  next.t = state.t + 1;
  next.turn.assign(config_.radar_count, 0.0);
  if (next.t < config_.radar_count) next.turn[next.t] = 1.0;

  out.raw_reward = coverage(next.heatmap, config_.physics.threshold);
  next.prev_coverage = out.raw_reward;
  out.expr = expr_reward(out.raw_reward, state.prev_coverage);
  out.penalty = config_.shaper.penalty(state.t, s);
  out.shaped = shaped_reward(out.expr, out.penalty);
  out.terminal = next.t == config_.radar_count;
  return out;
}

void write_trace_header(std::ostream& out) {
  out << "t,action_x,action_y,radar_x,radar_y,raw_reward,shaped_reward\n";
}

void write_trace_row(std::ostream& out, std::size_t t, const Vec2& action,
                     const StepResult& step) {
  out << t << ',' << action.x << ',' << action.y << ',' << step.radar.x << ','
      << step.radar.y << ',' << step.raw_reward << ',' << step.shaped << '\n';
}

}  // namespace farda
