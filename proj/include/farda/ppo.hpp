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

// Episode collection, generalized advantage estimation, the clipped
// surrogate update, the training loop and deterministic deployment.

#ifndef FARDA_PPO_HPP_
#define FARDA_PPO_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "farda/env.hpp"
#include "farda/policy.hpp"

namespace farda {

struct PPOConfig {
  double clip = 0.2;
  double lr_encoder = 1e-4;
  double lr_actor = 1e-4;
  double lr_critic = 5e-4;
  std::size_t episodes = 1000;
  std::size_t epochs = 10;
  double gamma = 1.0;
  double gae_lambda = 0.95;
  double value_coef = 0.5;
  double entropy_coef = 0.0;

  void validate() const;
};

struct RolloutStep {
  EnvState state;            // s_t, including M_t
  LstmState recurrent;       // (h_{t-1}, c_{t-1}) fed to the encoder
  std::array<double, 2> action{};  // unclamped sample
  double log_prob_old = 0.0;
  double value = 0.0;
  double reward = 0.0;       // shaped
  double raw_reward = 0.0;   // coverage after the step
  double advantage = 0.0;
  double ret = 0.0;
  Coord radar;
};

struct RolloutBuffer {
  std::vector<RolloutStep> steps;
  Scenario scenario;
  std::vector<double> jammers;  // normalized, as fed to the network
  double tau = 0.5;

  double shaped_return() const;
  double final_coverage() const;
};

Observation make_observation(const DeployEnv& env, const EnvState& state);

RolloutBuffer collect_episode(const DeployEnv& env, const PolicyNet& net,
                              const Scenario& scenario, Rng& rng,
                              const PPOConfig& config = PPOConfig{});

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Bootstraps with 0 after the last step.
GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values, double gamma,
                      double lambda);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double eps);
// d clipped_surrogate / d log-ratio
double clipped_surrogate_grad(double ratio, double advantage, double eps);

struct TrainStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 1.0;
};

// Zeroes gradients, replays the episode from a zero recurrent state and
// accumulates gradients of actor_loss + value_coef * critic_loss -
// entropy_coef * entropy. Throws std::runtime_error on a non-finite loss.
TrainStats ppo_gradients(const RolloutBuffer& buffer, PolicyNet& net,
                         const PPOConfig& config);

// `epochs` passes of ppo_gradients followed by one Adam step per
// component. Advantages in `buffer` are not modified.
TrainStats ppo_update(const RolloutBuffer& buffer, Agent& agent,
                      const PPOConfig& config);

struct CurvePoint {
  std::size_t episode = 0;
  double raw_coverage = 0.0;
  double shaped_return = 0.0;
};

struct TrainOptions {
  std::string checkpoint_path;      // empty: no checkpoints
  std::size_t checkpoint_interval = 0;  // 0: only at the end
  std::function<void(const CurvePoint&)> on_episode;
};

struct TrainResult {
  std::vector<CurvePoint> curve;
  Agent agent;
};

// Agent weights and the episode stream are both derived from `seed`.
TrainResult train(const PPOConfig& config, const EnvConfig& env_config,
                  std::uint64_t seed, const TrainOptions& options = {});
// Continues training an existing agent.
std::vector<CurvePoint> train(const PPOConfig& config, const DeployEnv& env,
                              Agent& agent, std::uint64_t seed,
                              const TrainOptions& options = {});

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

struct DeployResult {
  Deployment deployment;
  double coverage = 0.0;      // on the full 100 m grid
  double env_coverage = 0.0;  // on the policy's own grid
  double wall_time = 0.0;     // seconds, policy episode only
  std::vector<StepResult> steps;
  std::vector<std::array<double, 2>> actions;
};

// One mean-action episode on the agent's grid, then a full-grid coverage
// evaluation that is not included in `wall_time`.
DeployResult deploy(const Agent& agent, const Scenario& scenario,
                    const PhysicsParams& physics = PhysicsParams{});

}  // namespace farda

#endif  // FARDA_PPO_HPP_
