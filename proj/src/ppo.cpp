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

#include "farda/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace farda {

void PPOConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) {
    throw std::invalid_argument("PPO clip must lie in (0, 1)");
  }
  if (!(lr_encoder > 0 && lr_actor > 0 && lr_critic > 0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw std::invalid_argument("GAE lambda must lie in [0, 1]");
  }
}

double RolloutBuffer::shaped_return() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.reward;
  return total;
}

double RolloutBuffer::final_coverage() const {
  return steps.empty() ? 0.0 : steps.back().raw_reward;
}

Observation make_observation(const DeployEnv& env, const EnvState& state) {
  return {&state.heatmap, env.normalized_jammers(state.scenario),
          state.history, state.turn};
}

namespace {

Observation observation_of(const RolloutBuffer& buffer, const RolloutStep& s) {
  return {&s.state.heatmap, buffer.jammers, s.state.history, s.state.turn};
}

}  // namespace

GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values, double gamma,
                      double lambda) {
  if (rewards.size() != values.size()) {
    throw std::invalid_argument("compute_gae: rewards and values differ");
  }
  const std::size_t n = rewards.size();
  GaeResult out{std::vector<double>(n), std::vector<double>(n)};
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 < n ? values[t + 1] : 0.0;
    const double delta = rewards[t] + gamma * next_value - values[t];
    running = delta + gamma * lambda * running;
    out.advantages[t] = running;
    out.returns[t] = running + values[t];
  }
  return out;
}

RolloutBuffer collect_episode(const DeployEnv& env, const PolicyNet& net,
                              const Scenario& scenario, Rng& rng,
                              const PPOConfig& config) {
  RolloutBuffer buffer;
  buffer.scenario = scenario;
  buffer.jammers = env.normalized_jammers(scenario);
  buffer.tau = env.config().physics.threshold;

  EnvState state = env.reset(scenario);
  LstmState recurrent = net.zero_state();
  for (std::size_t t = 0; t < env.horizon(); ++t) {
    RolloutStep step;
    step.state = state;
    step.recurrent = recurrent;
    const Observation obs = observation_of(buffer, step);
    const ActResult r = act(net, obs, buffer.tau, recurrent, &rng, false);
    StepResult sr = env.step(state, {r.action[0], r.action[1]});
    step.action = r.sample;
    step.log_prob_old = r.log_prob;
    step.value = r.value;
    step.reward = sr.shaped;
    step.raw_reward = sr.raw_reward;
    step.radar = sr.radar;
    recurrent = r.out.next;
    state = std::move(sr.next);
    buffer.steps.push_back(std::move(step));
  }

  std::vector<double> rewards;
  std::vector<double> values;
  for (const auto& s : buffer.steps) {
    rewards.push_back(s.reward);
    values.push_back(s.value);
  }
  const GaeResult gae =
      compute_gae(rewards, values, config.gamma, config.gae_lambda);
  for (std::size_t t = 0; t < buffer.steps.size(); ++t) {
    buffer.steps[t].advantage = gae.advantages[t];
    buffer.steps[t].ret = gae.returns[t];
  }
  return buffer;
}

double clipped_surrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double clipped_surrogate_grad(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return ratio * advantage <= clipped * advantage ? ratio * advantage : 0.0;
}

TrainStats ppo_gradients(const RolloutBuffer& buffer, PolicyNet& net,
                         const PPOConfig& config) {
  net.zero_grad();
  const std::size_t n = buffer.steps.size();
  if (n == 0) throw std::invalid_argument("ppo: empty buffer");
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<StepCache> caches(n);
  std::vector<PolicyOutput> outs;
  outs.reserve(n);
  LstmState recurrent = net.zero_state();
  for (std::size_t t = 0; t < n; ++t) {
    const Observation obs = observation_of(buffer, buffer.steps[t]);
    outs.push_back(net.forward(obs, buffer.tau, recurrent, &caches[t]));
    recurrent = outs.back().next;
  }

  TrainStats stats;
  stats.mean_ratio = 0.0;
  std::vector<StepGrad> grads(n);
  for (std::size_t t = 0; t < n; ++t) {
    const RolloutStep& s = buffer.steps[t];
    const PolicyOutput& o = outs[t];
    const double log_prob = gaussian_log_prob(s.action, o.mean, o.std);
    const double ratio = std::exp(log_prob - s.log_prob_old);
    const double surrogate = clipped_surrogate(ratio, s.advantage, config.clip);
    const double entropy = gaussian_entropy(o.std);
    const double value_err = o.value - s.ret;

    stats.actor_loss -= surrogate * inv_n;
    stats.critic_loss += value_err * value_err * inv_n;
    stats.entropy += entropy * inv_n;
    stats.mean_ratio += ratio * inv_n;

    const double d_logp =
        -clipped_surrogate_grad(ratio, s.advantage, config.clip) * inv_n;
    StepGrad& g = grads[t];
    for (std::size_t k = 0; k < 2; ++k) {
      const double diff = s.action[k] - o.mean[k];
      const double var = o.std[k] * o.std[k];
      g.mean[k] = d_logp * diff / var;
      g.std[k] = d_logp * (diff * diff / (var * o.std[k]) - 1.0 / o.std[k]) -
                 config.entropy_coef * inv_n / o.std[k];
    }
    g.value = 2.0 * config.value_coef * value_err * inv_n;
  }
  const double total = stats.actor_loss + config.value_coef * stats.critic_loss -
                       config.entropy_coef * stats.entropy;
  if (!std::isfinite(total)) {
    std::ostringstream msg;
    msg << "non-finite PPO loss: actor=" << stats.actor_loss
        << " critic=" << stats.critic_loss << " entropy=" << stats.entropy
        << " ratio=" << stats.mean_ratio;
    throw std::runtime_error(msg.str());
  }

  LstmState d_next{std::vector<double>(64, 0.0), std::vector<double>(64, 0.0)};
  for (std::size_t t = n; t-- > 0;) net.backward(caches[t], grads[t], d_next);
  return stats;
}

TrainStats ppo_update(const RolloutBuffer& buffer, Agent& agent,
                      const PPOConfig& config) {
  config.validate();
  TrainStats stats;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    stats = ppo_gradients(buffer, agent.net, config);
    nn::adam_step(agent.net.encoder_parameters(), agent.encoder_opt,
                  config.lr_encoder);
    nn::adam_step(agent.net.actor_parameters(), agent.actor_opt,
                  config.lr_actor);
    nn::adam_step(agent.net.critic_parameters(), agent.critic_opt,
                  config.lr_critic);
  }
  return stats;
}

std::vector<CurvePoint> train(const PPOConfig& config, const DeployEnv& env,
                              Agent& agent, std::uint64_t seed,
                              const TrainOptions& options) {
  config.validate();
  Rng action_rng(mix_seed(seed, 1));
  const std::uint64_t scenario_stream = mix_seed(seed, 2);
  std::vector<CurvePoint> curve;
  curve.reserve(config.episodes);
  for (std::size_t e = 0; e < config.episodes; ++e) {
    const Scenario scenario =
        sample_scenario(mix_seed(scenario_stream, e), env.config().region);
    const RolloutBuffer buffer =
        collect_episode(env, agent.net, scenario, action_rng, config);
    ppo_update(buffer, agent, config);
    const CurvePoint point{e + 1, buffer.final_coverage(),
                           buffer.shaped_return()};
    curve.push_back(point);
    if (options.on_episode) options.on_episode(point);
    if (!options.checkpoint_path.empty() && options.checkpoint_interval > 0 &&
        (e + 1) % options.checkpoint_interval == 0) {
      save_checkpoint(agent, options.checkpoint_path);
    }
  }
  if (!options.checkpoint_path.empty()) {
    save_checkpoint(agent, options.checkpoint_path);
  }
  return curve;
}

TrainResult train(const PPOConfig& config, const EnvConfig& env_config,
                  std::uint64_t seed, const TrainOptions& options) {
  const DeployEnv env(env_config);
  TrainResult result{{}, Agent(env_config.grid, mix_seed(seed, 0))};
  result.curve = train(config, env, result.agent, seed, options);
  return result;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "episode,raw_coverage,shaped_return\n";
  for (const auto& p : curve) {
    out << p.episode << ',' << p.raw_coverage << ',' << p.shaped_return << '\n';
  }
}

DeployResult deploy(const Agent& agent, const Scenario& scenario,
                    const PhysicsParams& physics) {
  using Clock = std::chrono::steady_clock;
  EnvConfig config;
  config.physics = physics;
  config.grid = agent.grid;
  config.radar_count = agent.net.arch().radars;
  config.shaper = RewardShaper::uniform(config.radar_count);

  DeployResult result;
  const auto start = Clock::now();
  const DeployEnv env(config);
  EnvState state = env.reset(scenario);
  LstmState recurrent = agent.net.zero_state();
  for (std::size_t t = 0; t < env.horizon(); ++t) {
    const Observation obs = make_observation(env, state);
    const ActResult r =
        act(agent.net, obs, physics.threshold, recurrent, nullptr, true);
    StepResult sr = env.step(state, {r.action[0], r.action[1]});
    recurrent = r.out.next;
    state = sr.next;
    result.actions.push_back(r.action);
    result.steps.push_back(std::move(sr));
  }
  result.wall_time =
      std::chrono::duration<double>(Clock::now() - start).count();
  result.deployment = state.deployment;
  result.env_coverage = state.prev_coverage;
  result.coverage = deployment_coverage(
      physics, result.deployment, scenario,
      make_grid(config.region, GridPreset::kFull));
  return result;
}

}  // namespace farda
