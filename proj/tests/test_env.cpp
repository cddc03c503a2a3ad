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
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "farda/env.hpp"
#include "farda/random.hpp"
#include "oracles.hpp"

using namespace farda;

namespace {

double oracle_coverage(const std::vector<double>& values, double tau) {
  std::size_t n = 0;
  for (double v : values) n += v >= tau;
  return static_cast<double>(n) / static_cast<double>(values.size());
}

// Normalized action whose projection lands on normalized arclength u.
Vec2 action_at_arclength(const DeployEnv& env, double u) {
  return env.world_to_action(env.boundary().point_at(u * env.boundary().total_length()));
}

}  // namespace

TEST_CASE("reset") {
  const DeployEnv env(EnvConfig::for_preset(GridPreset::kTraining));
  const EnvState s = env.reset(sample_scenario(3, env.config().region));
  CHECK(s.heatmap.values.size() == 4800);
  for (double v : s.heatmap.values) REQUIRE(v == 0.0);
  CHECK(s.turn == std::vector<double>{1, 0, 0, 0});
  CHECK(s.history == std::vector<double>(8, 0.0));
  CHECK(s.t == 0);
  CHECK(s.prev_coverage == 0.0);
  CHECK(s.deployment.radars.empty());
}

TEST_CASE("episode transitions") {
  const EnvConfig cfg = EnvConfig::for_preset(GridPreset::kTraining);
  const DeployEnv env(cfg);
  const Scenario scenario = sample_scenario(11, cfg.region);
  Rng rng(4);
  EnvState s = env.reset(scenario);
  double prev = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    const Vec2 a{uniform01(rng), uniform01(rng)};
    const StepResult r = env.step(s, a);
    const StepResult again = env.step(s, a);
    REQUIRE(r.next.heatmap.values == again.next.heatmap.values);
    REQUIRE(r.radar == again.radar);

    REQUIRE(env.boundary().on_lattice(r.radar));
    const auto naive = oracle::naive_heatmap(cfg.physics, r.next.deployment, scenario, cfg.grid);
    REQUIRE(r.raw_reward == oracle_coverage(naive, cfg.physics.threshold));
    REQUIRE(r.raw_reward >= prev);
    REQUIRE(r.expr == doctest::Approx(expr_reward(r.raw_reward, prev)).epsilon(1e-15));
    REQUIRE(r.penalty == cfg.shaper.penalty(t, r.arclength));
    REQUIRE(r.shaped == r.expr + r.penalty);
    REQUIRE(r.terminal == (t + 1 == 4));

    // history has exactly the first 2(t+1) entries filled
    for (std::size_t k = 0; k < 8; ++k) {
      if (k < 2 * (t + 1)) {
        REQUIRE(r.next.history[k] >= 0.0);
        REQUIRE(r.next.history[k] <= 1.0);
      } else {
        REQUIRE(r.next.history[k] == 0.0);
      }
    }
    const Vec2 hist{r.next.history[2 * t], r.next.history[2 * t + 1]};
    REQUIRE(env.action_to_world(hist) == r.radar.as_vec());
    if (t + 1 < 4) REQUIRE(r.next.turn[t + 1] == 1.0);
    prev = r.raw_reward;
    s = r.next;
  }
  CHECK(s.turn == std::vector<double>(4, 0.0));
  CHECK_THROWS_AS(env.step(s, {0.5, 0.5}), std::logic_error);
}

TEST_CASE("first step matches one-radar coverage") {
  const EnvConfig cfg = EnvConfig::for_preset(GridPreset::kTraining);
  const DeployEnv env(cfg);
  const Scenario scenario = sample_scenario(5, cfg.region);
  const StepResult r = env.step(env.reset(scenario), {0.5, 1.0});
  CHECK(r.radar == Coord{35000, 60000});
  const Deployment one{{r.radar}};
  CHECK(r.raw_reward == oracle_coverage(oracle::naive_heatmap(cfg.physics, one, scenario, cfg.grid),
                                        cfg.physics.threshold));
  // out-of-box actions are clamped
  CHECK(env.step(env.reset(scenario), {7.0, -3.0}).radar == Coord{40000, 0});
}

TEST_CASE("augment channel") {
  Heatmap h{GridSpec{0, 0, 1, 1, 3, 2}, {0.0, 0.49, 0.5, 0.51, 1.0, 0.2}};
  const Heatmap m = augment_channel(h, 0.5);
  CHECK(m.values == std::vector<double>{0, 0, 1, 1, 1, 0});
  Heatmap z{GridSpec{0, 0, 1, 1, 3, 1}, {0, 0, 0}};
  CHECK(augment_channel(z, 0.5).values == std::vector<double>{0, 0, 0});
  // invariant under a monotone map fixing the tau level set
  Heatmap sq = h;
  for (double& v : sq.values) v = v * v * 2.0;  // 0.5 -> 0.5
  CHECK(augment_channel(sq, 0.5).values == m.values);
}

TEST_CASE("cvdp penalty") {
  CHECK(cvdp_penalty(0.375, 0.125, 0.375) == 0.0);
  CHECK(cvdp_penalty(0.375, 0.125, 0.375 + 0.15) == doctest::Approx(-0.325).epsilon(1e-12));
  CHECK(std::abs(cvdp_penalty(0.375, 0.125, 0.375 + 0.15) + 0.325) <= 1e-9);
  CHECK(std::abs(cvdp_penalty(0.625, 0.125, 0.375) + 0.125) <= 1e-9);
  CHECK(cvdp_penalty(0.5, 0.125, 0.5 - 0.125) == 0.0);  // boundary of tolerance
  Rng rng(6);
  for (int k = 0; k < 10000; ++k) {
    const double l = uniform01(rng);
    const double a = uniform01(rng);
    const double d = std::abs(l - a);
    const double p = cvdp_penalty(l, 0.125, a);
    REQUIRE(p <= 0.0);
    REQUIRE((p == 0.0) == (d <= 0.125));
    const double m = cvdp_penalty(l, 0.125, a, CvdpMode::kMonotone);
    REQUIRE(m <= 0.0);
    REQUIRE((m == 0.0) == (d <= 0.125));
  }
  // monotone variant: continuous and nonincreasing in the distance
  double prev = 0.0;
  for (double d = 0.0; d <= 0.9; d += 1e-4) {
    const double m = cvdp_penalty(0.0, 0.125, d, CvdpMode::kMonotone);
    REQUIRE(m <= prev + 1e-15);
    REQUIRE(prev - m <= 3.0 * 1e-4 + 1e-12);
    prev = m;
  }
  const RewardShaper shaper = RewardShaper::uniform(4);
  CHECK(shaper.anchors == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  CHECK(shaper.thresholds == std::vector<double>(4, 0.125));
}

TEST_CASE("expr and shaped rewards") {
  CHECK(expr_reward(0.3, 0.3) == 0.0);
  CHECK(expr_reward(0.0, 0.0) == 0.0);
  const double exact = (std::pow(10.0, 0.9) - std::pow(10.0, 0.5)) / 10.0;
  CHECK(std::abs(expr_reward(0.9, 0.5) - exact) <= 1e-9);
  CHECK(expr_reward(0.9, 0.5) == doctest::Approx(0.4781).epsilon(1e-4));
  CHECK(shaped_reward(0.4781, 0.0) == 0.4781);
  CHECK(shaped_reward(0.4781, -0.325) == doctest::Approx(0.1531).epsilon(1e-12));
  CHECK(shaped_reward(0.01, -0.325) < 0.0);
}

TEST_CASE("expr telescopes on penalty-free episodes") {
  const EnvConfig cfg = EnvConfig::for_preset(GridPreset::kTraining);
  const DeployEnv env(cfg);
  Rng rng(8);
  for (int episode = 0; episode < 20; ++episode) {
    EnvState s = env.reset(sample_scenario(rng(), cfg.region));
    double sum = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
      const double jitter = uniform(rng, -0.1, 0.1);
      const StepResult r = env.step(s, action_at_arclength(env, cfg.shaper.anchors[t] + jitter));
      REQUIRE(r.penalty == 0.0);
      sum += r.shaped;
      s = r.next;
    }
    REQUIRE(std::abs(sum - (std::pow(10.0, s.prev_coverage) - 1.0) / 10.0) <= 1e-12);
  }
}

TEST_CASE("penalty uses the snapped arclength") {
  const DeployEnv env(EnvConfig::for_preset(GridPreset::kToy));
  const EnvState s = env.reset(sample_scenario(1, env.config().region));
  const StepResult r = env.step(s, action_at_arclength(env, 0.9));
  CHECK(r.arclength == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(r.penalty == cvdp_penalty(0.125, 0.125, r.arclength));
}

TEST_CASE("trace rows") {
  const DeployEnv env(EnvConfig::for_preset(GridPreset::kToy));
  const StepResult r = env.step(env.reset(sample_scenario(1, env.config().region)), {0.5, 1.0});
  std::ostringstream out;
  write_trace_header(out);
  write_trace_row(out, 0, {0.5, 1.0}, r);
  std::istringstream in(out.str());
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,action_x,action_y,radar_x,radar_y,raw_reward,shaped_reward");
  CHECK(row.rfind("0,0.5,1,35000,60000,", 0) == 0);
}

TEST_CASE("config checks") {
  EnvConfig cfg = EnvConfig::for_preset(GridPreset::kToy);
  cfg.radar_count = 3;
  CHECK_THROWS_AS(DeployEnv{cfg}, std::invalid_argument);
  cfg.shaper = RewardShaper::uniform(3);
  CHECK_NOTHROW(DeployEnv{cfg});
  const DeployEnv env(EnvConfig::for_preset(GridPreset::kToy));
  const EnvState s = env.reset(sample_scenario(1, env.config().region));
  CHECK_THROWS_AS(env.step(s, {std::nan(""), 0.5}), std::invalid_argument);
  const auto j = env.normalized_jammers(Scenario{{{40000, 60000}, {50000, 120000}}});
  CHECK(j == std::vector<double>{0, 0, 1, 1});
}
