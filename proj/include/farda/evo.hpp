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

// Real-coded genetic algorithm and particle swarm optimizer over a box
// decision domain, plus the decision domains used for radar placement.

#ifndef FARDA_EVO_HPP_
#define FARDA_EVO_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "farda/geometry.hpp"
#include "farda/random.hpp"

namespace farda {

using DecisionVector = std::vector<double>;
using FitnessFn = std::function<double(std::span<const double>)>;

// Axis-aligned box with a decoder to a legal Deployment.
class DecisionDomain {
 public:
  using Decoder = std::function<Deployment(std::span<const double>)>;

  DecisionDomain(std::vector<Interval> bounds, Decoder decode);

  std::size_t dimension() const { return bounds_.size(); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  bool contains(std::span<const double> x) const;
  DecisionVector sample(Rng& rng) const;
  Deployment decode(std::span<const double> x) const { return decode_(x); }

 private:
  std::vector<Interval> bounds_;
  Decoder decode_;
};

// One arclength in [0, L] per radar, mapped onto the boundary lattice.
DecisionDomain boundary_domain(const RegionSpec& region,
                               std::size_t radar_count = kDefaultRadarCount);
// One (x, y) pair per radar inside the deploy rectangle, rounded to the
// lattice.
DecisionDomain region_domain(const RegionSpec& region,
                             std::size_t radar_count = kDefaultRadarCount);

struct GAConfig {
  std::size_t population = 50;
  std::size_t iterations = 100;
  double crossover_prob = 0.9;
  double mutation_prob = 0.1;

  void validate() const;
};

struct PSOConfig {
  std::size_t swarm = 20;
  std::size_t iterations = 100;
  double inertia = 1.0;
  double c1 = 2.0;
  double c2 = 2.0;

  void validate() const;
};

struct SolveResult {
  DecisionVector best_position;
  double best_fitness = 0.0;
  std::vector<double> history;  // best-so-far after each iteration
  double wall_time = 0.0;       // seconds
  std::size_t evaluations = 0;
};

// Arithmetic crossover. When either child leaves the domain the crossover
// fails and the parents come back unchanged.
std::pair<DecisionVector, DecisionVector> ga_crossover(
    std::span<const double> xi, std::span<const double> xj, double k,
    const DecisionDomain& domain);

// With probability `mutation_prob` the whole chromosome is redrawn.
DecisionVector ga_mutate(std::span<const double> x, double mutation_prob,
                         const DecisionDomain& domain, Rng& rng);

SolveResult ga_solve(const GAConfig& config, const FitnessFn& fitness,
                     const DecisionDomain& domain, std::uint64_t seed);

// v' = w v + c1 r1 (p - x) + c2 r2 (g - x); x' = x + v' when that stays in
// the domain, otherwise x is kept and v' is still returned.
void pso_particle_update(std::span<double> x, std::span<double> v,
                         std::span<const double> personal_best,
                         std::span<const double> global_best,
                         const PSOConfig& config, double r1, double r2,
                         const DecisionDomain& domain);

struct Swarm {
  std::vector<DecisionVector> positions;
  std::vector<DecisionVector> velocities;
  std::vector<DecisionVector> personal_best;
  DecisionVector global_best;
};

// Moves every particle once with fresh (r1, r2) per particle.
void pso_step(Swarm& swarm, const PSOConfig& config,
              const DecisionDomain& domain, Rng& rng);

SolveResult pso_solve(const PSOConfig& config, const FitnessFn& fitness,
                      const DecisionDomain& domain, std::uint64_t seed);

// Runs from a caller-supplied swarm; personal and global bests are reset
// from the initial positions.
SolveResult pso_solve(const PSOConfig& config, const FitnessFn& fitness,
                      const DecisionDomain& domain, Swarm initial,
                      std::uint64_t seed);

}  // namespace farda

#endif  // FARDA_EVO_HPP_
