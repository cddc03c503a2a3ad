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

#include "farda/evo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace farda {

DecisionDomain::DecisionDomain(std::vector<Interval> bounds, Decoder decode)
    : bounds_(std::move(bounds)), decode_(std::move(decode)) {}

bool DecisionDomain::contains(std::span<const double> x) const {
  if (x.size() != bounds_.size()) return false;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!bounds_[d].contains(x[d])) return false;
  }
  return true;
}

DecisionVector DecisionDomain::sample(Rng& rng) const {
  DecisionVector x(bounds_.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    x[d] = uniform(rng, bounds_[d].lo, bounds_[d].hi);
  }
  return x;
}

DecisionDomain boundary_domain(const RegionSpec& region,
                               std::size_t radar_count) {
  const Boundary boundary(region);
  std::vector<Interval> bounds(radar_count, {0.0, boundary.total_length()});
  return DecisionDomain(std::move(bounds), [boundary](std::span<const double> x) {
    Deployment dep;
    dep.radars.reserve(x.size());
    for (double s : x) {
      const double clamped = std::clamp(s, 0.0, boundary.total_length());
      dep.radars.push_back(boundary.snap(boundary.point_at(clamped)));
    }
    return dep;
  });
}

DecisionDomain region_domain(const RegionSpec& region,
                             std::size_t radar_count) {
  std::vector<Interval> bounds;
  bounds.reserve(2 * radar_count);
  for (std::size_t r = 0; r < radar_count; ++r) {
    bounds.push_back(region.deploy_x);
    bounds.push_back(region.deploy_y);
  }
  return DecisionDomain(std::move(bounds), [region](std::span<const double> x) {
    Deployment dep;
    dep.radars.reserve(x.size() / 2);
    for (std::size_t k = 0; k + 1 < x.size(); k += 2) {
      const double px = std::clamp(x[k], region.deploy_x.lo, region.deploy_x.hi);
      const double py = std::clamp(x[k + 1], region.deploy_y.lo, region.deploy_y.hi);
      dep.radars.push_back({static_cast<std::int64_t>(std::round(px)),
                            static_cast<std::int64_t>(std::round(py))});
    }
    return dep;
  });
}

void GAConfig::validate() const {
  if (population < 2 || population % 2 != 0) {
    throw std::invalid_argument("GA population must be even and >= 2");
  }
  if (!(crossover_prob >= 0 && crossover_prob <= 1) ||
      !(mutation_prob >= 0 && mutation_prob <= 1)) {
    throw std::invalid_argument("GA probabilities must lie in [0, 1]");
  }
}

void PSOConfig::validate() const {
  if (swarm < 1) throw std::invalid_argument("PSO swarm must be >= 1");
  if (inertia < 0 || c1 < 0 || c2 < 0) {
    throw std::invalid_argument("PSO coefficients must be >= 0");
  }
}

std::pair<DecisionVector, DecisionVector> ga_crossover(
    std::span<const double> xi, std::span<const double> xj, double k,
    const DecisionDomain& domain) {
  if (xi.size() != xj.size()) {
    throw std::invalid_argument("crossover parents differ in dimension");
  }
  DecisionVector ci(xi.size());
  DecisionVector cj(xj.size());
  for (std::size_t d = 0; d < xi.size(); ++d) {
    ci[d] = k * xi[d] + (1.0 - k) * xj[d];
    cj[d] = k * xj[d] + (1.0 - k) * xi[d];
  }
  if (!domain.contains(ci) || !domain.contains(cj)) {
    return {DecisionVector(xi.begin(), xi.end()),
            DecisionVector(xj.begin(), xj.end())};
  }
  return {std::move(ci), std::move(cj)};
}

DecisionVector ga_mutate(std::span<const double> x, double mutation_prob,
                         const DecisionDomain& domain, Rng& rng) {
  if (uniform01(rng) < mutation_prob) return domain.sample(rng);
  return DecisionVector(x.begin(), x.end());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Roulette-wheel pick; falls back to uniform when the total is zero.
std::size_t select_parent(const std::vector<double>& fit, double total,
                          Rng& rng) {
  if (!(total > 0.0)) {
    return std::min(fit.size() - 1,
                    static_cast<std::size_t>(uniform01(rng) * fit.size()));
  }
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    acc += fit[i];
    if (target < acc) return i;
  }
  return fit.size() - 1;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

SolveResult ga_solve(const GAConfig& config, const FitnessFn& fitness,
                     const DecisionDomain& domain, std::uint64_t seed) {
  config.validate();
  const auto start = Clock::now();
  Rng rng(seed);
  SolveResult result;

  std::vector<DecisionVector> pop;
  pop.reserve(config.population);
  for (std::size_t i = 0; i < config.population; ++i) {
    pop.push_back(domain.sample(rng));
  }
  std::vector<double> fit(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);
  result.evaluations += pop.size();

  std::size_t best = argmax(fit);
  result.best_position = pop[best];
  result.best_fitness = fit[best];

  for (std::size_t it = 0; it < config.iterations; ++it) {
    double total = 0.0;
    for (double f : fit) total += f;

    std::vector<DecisionVector> next;
    next.reserve(config.population + 1);
    next.push_back(result.best_position);  // elitism
    while (next.size() < config.population) {
      const std::size_t i = select_parent(fit, total, rng);
      const std::size_t j = select_parent(fit, total, rng);
      DecisionVector a = pop[i];
      DecisionVector b = pop[j];
      if (uniform01(rng) < config.crossover_prob) {
        const double k = uniform01(rng);
        std::tie(a, b) = ga_crossover(a, b, k, domain);
      }
      next.push_back(ga_mutate(a, config.mutation_prob, domain, rng));
      if (next.size() < config.population) {
        next.push_back(ga_mutate(b, config.mutation_prob, domain, rng));
      }
    }
    pop = std::move(next);

    fit[0] = result.best_fitness;
    for (std::size_t k = 1; k < pop.size(); ++k) fit[k] = fitness(pop[k]);
    result.evaluations += pop.size() - 1;

    best = argmax(fit);
    if (fit[best] > result.best_fitness) {
      result.best_fitness = fit[best];
      result.best_position = pop[best];
    }
    result.history.push_back(result.best_fitness);
  }
  result.wall_time = seconds_since(start);
  return result;
}

void pso_particle_update(std::span<double> x, std::span<double> v,
                         std::span<const double> personal_best,
                         std::span<const double> global_best,
                         const PSOConfig& config, double r1, double r2,
                         const DecisionDomain& domain) {
  const std::size_t n = x.size();
  if (v.size() != n || personal_best.size() != n || global_best.size() != n) {
    throw std::invalid_argument("PSO state shapes disagree");
  }
  DecisionVector moved(n);
  for (std::size_t d = 0; d < n; ++d) {
    v[d] = config.inertia * v[d] + config.c1 * r1 * (personal_best[d] - x[d]) +
           config.c2 * r2 * (global_best[d] - x[d]);
    moved[d] = x[d] + v[d];
  }
  if (domain.contains(moved)) std::copy(moved.begin(), moved.end(), x.begin());
}

void pso_step(Swarm& swarm, const PSOConfig& config,
              const DecisionDomain& domain, Rng& rng) {
  for (std::size_t i = 0; i < swarm.positions.size(); ++i) {
    const double r1 = uniform01(rng);
    const double r2 = uniform01(rng);
    pso_particle_update(swarm.positions[i], swarm.velocities[i],
                        swarm.personal_best[i], swarm.global_best, config, r1,
                        r2, domain);
  }
}

SolveResult pso_solve(const PSOConfig& config, const FitnessFn& fitness,
                      const DecisionDomain& domain, std::uint64_t seed) {
  Rng rng(seed);
  Swarm swarm;
  for (std::size_t i = 0; i < config.swarm; ++i) {
    swarm.positions.push_back(domain.sample(rng));
    swarm.velocities.emplace_back(domain.dimension(), 0.0);
  }
  // Child stream keeps the update draws independent of initialization.
  return pso_solve(config, fitness, domain, std::move(swarm),
                   mix_seed(seed, 1));
}

SolveResult pso_solve(const PSOConfig& config, const FitnessFn& fitness,
                      const DecisionDomain& domain, Swarm swarm,
                      std::uint64_t seed) {
  config.validate();
  const auto start = Clock::now();
  Rng rng(seed);
  SolveResult result;

  const std::size_t n = swarm.positions.size();
  if (n == 0 || swarm.velocities.size() != n) {
    throw std::invalid_argument("PSO swarm is empty or inconsistent");
  }
  swarm.personal_best = swarm.positions;
  std::vector<double> pbest_fit(n);
  for (std::size_t i = 0; i < n; ++i) pbest_fit[i] = fitness(swarm.positions[i]);
  result.evaluations += n;

  std::size_t g = argmax(pbest_fit);
  swarm.global_best = swarm.personal_best[g];
  result.best_fitness = pbest_fit[g];

  for (std::size_t it = 0; it < config.iterations; ++it) {
    pso_step(swarm, config, domain, rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = fitness(swarm.positions[i]);
      ++result.evaluations;
      if (f > pbest_fit[i]) {
        pbest_fit[i] = f;
        swarm.personal_best[i] = swarm.positions[i];
      }
      if (f > result.best_fitness) {
        result.best_fitness = f;
        swarm.global_best = swarm.positions[i];
      }
    }
    result.history.push_back(result.best_fitness);
  }
  result.best_position = swarm.global_best;
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace farda
