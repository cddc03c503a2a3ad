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

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "farda/ppo.hpp"
#include "gradcheck.hpp"

using namespace farda;

namespace {

const EnvConfig kToy = EnvConfig::for_preset(GridPreset::kToy);

RolloutBuffer toy_episode(const DeployEnv& env, const PolicyNet& net, std::uint64_t seed) {
  Rng rng(seed);
  return collect_episode(env, net, sample_scenario(seed, env.config().region), rng);
}

Observation obs_at(const RolloutBuffer& b, std::size_t t) {
  const auto& s = b.steps[t].state;
  return {&s.heatmap, b.jammers, s.history, s.turn};
}

// Gradient of -(1/T) sum A_t log pi(a_t) + (c_v/T) sum (V_t - R_t)^2.
void vanilla_pg_gradient(const RolloutBuffer& b, PolicyNet& net, double value_coef) {
  net.zero_grad();
  const std::size_t n = b.steps.size();
  const double w = 1.0 / static_cast<double>(n);
  std::vector<StepCache> caches(n);
  std::vector<StepGrad> grads(n);
  LstmState s = net.zero_state();
  for (std::size_t t = 0; t < n; ++t) {
    const PolicyOutput o = net.forward(obs_at(b, t), b.tau, s, &caches[t]);
    const double a = b.steps[t].advantage;
    for (std::size_t k = 0; k < 2; ++k) {
      const double z = (b.steps[t].action[k] - o.mean[k]) / o.std[k];
      grads[t].mean[k] = -w * a * z / o.std[k];
      grads[t].std[k] = -w * a * (z * z - 1.0) / o.std[k];
    }
    grads[t].value = w * value_coef * 2.0 * (o.value - b.steps[t].ret);
    s = o.next;
  }
  LstmState d_next{std::vector<double>(64, 0.0), std::vector<double>(64, 0.0)};
  for (std::size_t t = n; t-- > 0;) net.backward(caches[t], grads[t], d_next);
}

std::vector<std::vector<double>> grads_of(PolicyNet& net) {
  std::vector<std::vector<double>> out;
  for (nn::Parameter* p : net.parameters()) out.push_back(p->grad.data);
  return out;
}

std::vector<std::vector<double>> values_of(PolicyNet& net) {
  std::vector<std::vector<double>> out;
  for (nn::Parameter* p : net.parameters()) out.push_back(p->value.data);
  return out;
}

double max_rel_diff(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      const double d = std::abs(a[i][k] - b[i][k]);
      worst = std::max(worst, d / std::max({std::abs(a[i][k]), std::abs(b[i][k]), 1e-300}));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("config validation") {
  PPOConfig c;
  CHECK_NOTHROW(c.validate());
  c.clip = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PPOConfig{};
  c.lr_actor = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PPOConfig{};
  c.gae_lambda = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("GAE fixtures") {
  const std::vector<double> r{0.1, 0.2, 0.3};
  const std::vector<double> v{0.5, 0.4, 0.2};
  // lambda = 0: one-step TD errors.
  auto g0 = compute_gae(r, v, 1.0, 0.0);
  CHECK(g0.advantages[0] == doctest::Approx(0.1 + 0.4 - 0.5));
  CHECK(g0.advantages[1] == doctest::Approx(0.2 + 0.2 - 0.4));
  CHECK(g0.advantages[2] == doctest::Approx(0.3 - 0.2));
  // lambda = 1, gamma = 1: Monte Carlo return minus baseline.
  auto g1 = compute_gae(r, v, 1.0, 1.0);
  CHECK(g1.advantages[0] == doctest::Approx(0.6 - 0.5));
  CHECK(g1.advantages[1] == doctest::Approx(0.5 - 0.4));
  CHECK(g1.advantages[2] == doctest::Approx(0.3 - 0.2));
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(g1.returns[t] == doctest::Approx(g1.advantages[t] + v[t]));
  }
  // Two-step hand computation with gamma = 0.9, lambda = 0.95.
  auto g = compute_gae({1.0, 0.5}, {0.3, 0.6}, 0.9, 0.95);
  const double d1 = 0.5 - 0.6;
  const double d0 = 1.0 + 0.9 * 0.6 - 0.3;
  CHECK(g.advantages[1] == doctest::Approx(d1));
  CHECK(g.advantages[0] == doctest::Approx(d0 + 0.9 * 0.95 * d1));
  auto f = compute_gae({1.0, 0.0}, {0.5, 0.2}, 1.0, 0.95);
  CHECK(f.advantages[1] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(f.advantages[0] == doctest::Approx(0.51).epsilon(1e-12));
  CHECK_THROWS_AS(compute_gae({1.0}, {1.0, 2.0}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("clipped surrogate fixtures") {
  CHECK(clipped_surrogate(1.0, 0.7, 0.2) == doctest::Approx(0.7));
  CHECK(clipped_surrogate(1.5, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(clipped_surrogate(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  CHECK(clipped_surrogate(0.5, 1.0, 0.2) == doctest::Approx(0.5));
  CHECK(clipped_surrogate(1.5, -1.0, 0.2) == doctest::Approx(-1.5));
  // Gradient vanishes exactly where the clipped branch is selected.
  CHECK(clipped_surrogate_grad(1.5, 1.0, 0.2) == 0.0);
  CHECK(clipped_surrogate_grad(0.5, -1.0, 0.2) == 0.0);
  CHECK(clipped_surrogate_grad(1.1, 1.0, 0.2) == doctest::Approx(1.1));
  CHECK(clipped_surrogate_grad(1.5, -1.0, 0.2) == doctest::Approx(-1.5));
  // The objective never exceeds (1 + eps) |A| for positive advantages.
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double r = uniform(rng, 0.0, 3.0);
    const double a = uniform(rng, -2.0, 2.0);
    const double s = clipped_surrogate(r, a, 0.2);
    CHECK(s <= r * a + 1e-15);
    if (a > 0) CHECK(s <= 1.2 * a + 1e-15);
    // d/dlog r matches a central difference away from the kinks.
    const double lr = std::log(r);
    if (std::abs(r - 0.8) > 1e-3 && std::abs(r - 1.2) > 1e-3) {
      const double fd = (clipped_surrogate(std::exp(lr + 1e-7), a, 0.2) -
                         clipped_surrogate(std::exp(lr - 1e-7), a, 0.2)) / 2e-7;
      CHECK(clipped_surrogate_grad(r, a, 0.2) == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
    }
  }
}

TEST_CASE("episode collection") {
  const DeployEnv env(kToy);
  PolicyNet net(PolicyArch::for_grid(env.config().grid), 3);
  const RolloutBuffer b = toy_episode(env, net, 3);
  REQUIRE(b.steps.size() == 4);
  CHECK(b.tau == env.config().physics.threshold);

  // Replaying reproduces stored log-probs and recurrent states.
  LstmState s = net.zero_state();
  EnvState st = env.reset(b.scenario);
  double shaped = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    const auto& step = b.steps[t];
    CHECK(step.recurrent.h == s.h);
    CHECK(step.state.heatmap.values == st.heatmap.values);
    const PolicyOutput o = net.forward(obs_at(b, t), b.tau, s);
    CHECK(step.value == o.value);
    CHECK(std::abs(gaussian_log_prob(step.action, o.mean, o.std) - step.log_prob_old) <= 1e-12);
    const StepResult r = env.step(st, {std::clamp(step.action[0], 0.0, 1.0),
                                       std::clamp(step.action[1], 0.0, 1.0)});
    CHECK(step.reward == r.shaped);
    CHECK(step.raw_reward == r.raw_reward);
    CHECK(step.radar == r.radar);
    shaped += r.shaped;
    st = r.next;
    s = o.next;
  }
  CHECK(b.shaped_return() == doctest::Approx(shaped));
  CHECK(b.final_coverage() == b.steps.back().raw_reward);

  std::vector<double> rewards, values;
  for (const auto& step : b.steps) {
    rewards.push_back(step.reward);
    values.push_back(step.value);
  }
  const GaeResult g = compute_gae(rewards, values, 1.0, 0.95);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(b.steps[t].advantage == g.advantages[t]);
    CHECK(b.steps[t].ret == g.returns[t]);
  }
}

TEST_CASE("PPO at ratio one equals vanilla policy gradient") {
  const DeployEnv env(kToy);
  for (std::uint64_t seed : {4, 5, 6}) {
    Agent agent(env.config().grid, seed);
    const RolloutBuffer b = toy_episode(env, agent.net, seed);
    PPOConfig cfg;
    cfg.clip = 0.99;
    cfg.epochs = 1;

    const TrainStats st = ppo_gradients(b, agent.net, cfg);
    CHECK(st.mean_ratio == doctest::Approx(1.0).epsilon(1e-12));
    const auto ppo = grads_of(agent.net);
    vanilla_pg_gradient(b, agent.net, cfg.value_coef);
    const auto pg = grads_of(agent.net);
    CHECK(max_rel_diff(ppo, pg) <= 1e-10);

    // One update step matches Adam on the vanilla gradient.
    Agent reference = agent;
    ppo_update(b, agent, cfg);
    vanilla_pg_gradient(b, reference.net, cfg.value_coef);
    nn::adam_step(reference.net.encoder_parameters(), reference.encoder_opt, cfg.lr_encoder);
    nn::adam_step(reference.net.actor_parameters(), reference.actor_opt, cfg.lr_actor);
    nn::adam_step(reference.net.critic_parameters(), reference.critic_opt, cfg.lr_critic);
    CHECK(max_rel_diff(values_of(agent.net), values_of(reference.net)) <= 1e-10);
  }
}

TEST_CASE("PPO gradient matches finite differences of its loss") {
  const DeployEnv env(kToy);
  Agent agent(env.config().grid, 8);
  const RolloutBuffer b = toy_episode(env, agent.net, 8);
  // Move off ratio one so both clip branches are exercised.
  PPOConfig cfg;
  cfg.epochs = 3;
  cfg.lr_actor = cfg.lr_encoder = 3e-2;
  cfg.entropy_coef = 0.01;
  ppo_update(b, agent, cfg);
  cfg.clip = 0.1;
  PolicyNet& net = agent.net;
  ppo_gradients(b, net, cfg);
  Rng rng(9);
  auto loss = [&] {
    PolicyNet copy = net;
    const TrainStats s = ppo_gradients(b, copy, cfg);
    return s.actor_loss + cfg.value_coef * s.critic_loss - cfg.entropy_coef * s.entropy;
  };
  double worst = 0.0;
  for (nn::Parameter* p : net.parameters()) {
    const std::vector<double> g = p->grad.data;
    worst = std::max(worst, gradcheck::check(p->value.data, g, loss, 6, rng));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("advantages are frozen across epochs") {
  const DeployEnv env(kToy);
  Agent agent(env.config().grid, 10);
  const RolloutBuffer b = toy_episode(env, agent.net, 10);
  std::vector<double> adv;
  for (const auto& s : b.steps) adv.push_back(s.advantage);
  PPOConfig cfg;
  cfg.epochs = 5;
  cfg.lr_actor = cfg.lr_encoder = 1e-2;
  const TrainStats st = ppo_update(b, agent, cfg);
  for (std::size_t t = 0; t < adv.size(); ++t) CHECK(b.steps[t].advantage == adv[t]);
  CHECK(st.mean_ratio != 1.0);
  CHECK(agent.actor_opt.step == 5);
  CHECK(agent.encoder_opt.step == 5);
}

TEST_CASE("non-finite loss is reported") {
  const DeployEnv env(kToy);
  Agent agent(env.config().grid, 11);
  RolloutBuffer b = toy_episode(env, agent.net, 11);
  b.steps[1].ret = std::nan("");
  CHECK_THROWS_AS(ppo_gradients(b, agent.net, PPOConfig{}), std::runtime_error);
  b.steps.clear();
  CHECK_THROWS_AS(ppo_gradients(b, agent.net, PPOConfig{}), std::invalid_argument);
}

TEST_CASE("training is deterministic") {
  PPOConfig cfg;
  cfg.episodes = 100;
  const TrainResult a = train(cfg, kToy, 42);
  const TrainResult b = train(cfg, kToy, 42);
  REQUIRE(a.curve.size() == 100);
  for (std::size_t e = 0; e < 100; ++e) {
    CHECK(a.curve[e].episode == e + 1);
    CHECK(a.curve[e].raw_coverage == b.curve[e].raw_coverage);
    CHECK(a.curve[e].shaped_return == b.curve[e].shaped_return);
  }
  CHECK(values_of(const_cast<PolicyNet&>(a.agent.net)) ==
        values_of(const_cast<PolicyNet&>(b.agent.net)));
  const TrainResult c = train(cfg, kToy, 43);
  CHECK(c.curve[0].raw_coverage != a.curve[0].raw_coverage);

  std::ostringstream csv;
  write_curve_csv(csv, a.curve);
  CHECK(csv.str().rfind("episode,raw_coverage,shaped_return\n1,", 0) == 0);
}

TEST_CASE("deployment") {
  const Agent agent(make_grid(RegionSpec{}, GridPreset::kTraining), 12);
  const Scenario s = sample_scenario(77, RegionSpec{});
  const PhysicsParams physics;
  const DeployResult a = deploy(agent, s, physics);
  const DeployResult b = deploy(agent, s, physics);
  REQUIRE(a.deployment.radars.size() == 4);
  CHECK(a.deployment == b.deployment);
  CHECK(a.actions == b.actions);
  CHECK(a.coverage == deployment_coverage(physics, a.deployment, s,
                                          make_grid(RegionSpec{}, GridPreset::kFull)));
  CHECK(a.env_coverage == a.steps.back().raw_reward);
  const Boundary boundary;
  for (const Coord& r : a.deployment.radars) CHECK(boundary.on_lattice(r));
  CHECK(a.wall_time > 0.0);
  CHECK(a.wall_time < 1.0);
}
