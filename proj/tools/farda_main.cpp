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

// farda: dataset generation, solver benchmarks, policy training, reports and
// heatmap export.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "farda/bench.hpp"
#include "farda/ppo.hpp"

namespace {

using namespace farda;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

ScenarioEntry scenario_from_line(const std::string& line) {
  const auto entry = parse_scenario_line(line);
  if (!entry) throw std::invalid_argument("malformed scenario line: " + line);
  return *entry;
}

struct PhysicsFlags {
  double element_spacing = PhysicsParams{}.element_spacing;
  double threshold = PhysicsParams{}.threshold;

  void add(CLI::App* app) {
    app->add_option("--element-spacing", element_spacing,
                    "Array element spacing d_E in meters")
        ->capture_default_str();
    app->add_option("--threshold", threshold, "Detection threshold tau")
        ->capture_default_str();
  }
  PhysicsParams params() const {
    PhysicsParams p;
    p.element_spacing = element_spacing;
    p.threshold = threshold;
    p.validate();
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"farda radar deployment toolkit"};
  app.require_subcommand(1);
  int status = 0;

  // gen-dataset
  auto* gen = app.add_subcommand(
      "gen-dataset", "Sample jammer scenarios.\nOutput: id,jx1,jy1,jx2,jy2,jx3,jy3");
  std::size_t gen_count = 500;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--count", gen_count, "Number of scenarios")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Dataset seed")->required();
  gen->add_option("--out", gen_out, "Output CSV")->required();
  gen->callback([&] {
    auto out = open_out(gen_out);
    write_scenario_file(out, generate_dataset(gen_count, gen_seed, RegionSpec{}));
  });

  // solve
  auto* solve = app.add_subcommand(
      "solve",
      "Run one method over a dataset.\n"
      "Output: id,method,coverage,wall_time_seconds,r1x,r1y,...,r4x,r4y");
  std::string solve_method, solve_dataset, solve_checkpoint, solve_out;
  std::uint64_t solve_seed = 0;
  BenchConfig bench;
  PhysicsFlags solve_physics;
  std::string solve_grid = "training";
  solve->add_option("--method", solve_method, "ga, pso, ga1d, pso1d or farda")
      ->required()
      ->check(CLI::IsMember({"ga", "pso", "ga1d", "pso1d", "farda"}));
  solve->add_option("--dataset", solve_dataset, "Scenario CSV")->required();
  solve->add_option("--seed", solve_seed, "Base seed; scenario id is xor-ed in")
      ->required();
  solve->add_option("--checkpoint", solve_checkpoint, "Policy checkpoint (farda)");
  solve->add_option("--out", solve_out, "Records CSV")->required();
  solve->add_option("--threads", bench.threads, "Worker threads, 0 = all cores")
      ->capture_default_str();
  solve->add_option("--grid", solve_grid, "Fitness grid for the evolutionary methods")
      ->check(CLI::IsMember({"full", "training", "toy"}))
      ->capture_default_str();
  solve->add_option("--ga-population", bench.ga.population)->capture_default_str();
  solve->add_option("--ga-iterations", bench.ga.iterations)->capture_default_str();
  solve->add_option("--pso-swarm", bench.pso.swarm)->capture_default_str();
  solve->add_option("--pso-iterations", bench.pso.iterations)->capture_default_str();
  solve_physics.add(solve);
  solve->callback([&] {
    const Method method = parse_method(solve_method);
    bench.physics = solve_physics.params();
    bench.solve_grid = parse_grid_preset(solve_grid);
    std::optional<Agent> agent;
    if (method == Method::kFarda) {
      if (solve_checkpoint.empty()) {
        throw CLI::ValidationError("--checkpoint", "required for method farda");
      }
      agent.emplace(load_checkpoint(solve_checkpoint));
    }
    const BenchRun run = run_bench(solve_dataset, method, bench, solve_seed,
                                   agent ? &*agent : nullptr);
    auto out = open_out(solve_out);
    write_records_csv(out, run.records);
    for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
    if (!run.warnings.empty()) {
      std::cerr << run.warnings.size() << " malformed line(s) skipped\n";
      status = 2;
    }
  });

  // train
  auto* tr = app.add_subcommand(
      "train", "Train the deployment policy.\nCurve output: episode,raw_coverage,shaped_return");
  PPOConfig ppo;
  std::uint64_t train_seed = 0;
  std::string train_grid = "training", train_ckpt, train_curve;
  std::size_t train_interval = 0;
  PhysicsFlags train_physics;
  tr->add_option("--episodes", ppo.episodes)->capture_default_str();
  tr->add_option("--seed", train_seed)->required();
  tr->add_option("--grid", train_grid)
      ->check(CLI::IsMember({"full", "training", "toy"}))
      ->capture_default_str();
  tr->add_option("--checkpoint-out", train_ckpt, "Checkpoint path")->required();
  tr->add_option("--checkpoint-interval", train_interval,
                 "Episodes between checkpoints, 0 = only at the end")
      ->capture_default_str();
  tr->add_option("--curve-out", train_curve, "Learning curve CSV");
  tr->add_option("--epochs", ppo.epochs, "Update epochs per episode")->capture_default_str();
  tr->add_option("--clip", ppo.clip)->capture_default_str();
  tr->add_option("--entropy-coef", ppo.entropy_coef)->capture_default_str();
  train_physics.add(tr);
  tr->callback([&] {
    const EnvConfig env =
        EnvConfig::for_preset(parse_grid_preset(train_grid), train_physics.params());
    TrainOptions options;
    options.checkpoint_path = train_ckpt;
    options.checkpoint_interval = train_interval;
    options.on_episode = [&](const CurvePoint& p) {
      if (p.episode % 100 == 0 || p.episode == ppo.episodes) {
        std::fprintf(stderr, "episode %zu coverage %.4f return %.4f\n",
                     p.episode, p.raw_coverage, p.shaped_return);
      }
    };
    const TrainResult result = train(ppo, env, train_seed, options);
    if (!train_curve.empty()) {
      auto out = open_out(train_curve);
      write_curve_csv(out, result.curve);
    }
  });

  // report
  auto* rep = app.add_subcommand(
      "report",
      "Aggregate records.\nOutput: section,scenarios,method,count,mean_coverage,"
      "mean_time,mean_efficiency,improvement_ratio");
  std::vector<std::string> rep_records;
  std::string rep_reference, rep_out;
  rep->add_option("--records", rep_records, "Records CSV files")->required();
  rep->add_option("--reference-method", rep_reference, "Method for improvement ratios");
  rep->add_option("--out", rep_out, "Report CSV")->required();
  rep->callback([&] {
    std::vector<BenchRecord> all;
    for (const auto& path : rep_records) {
      auto recs = read_records_csv(path);
      all.insert(all.end(), recs.begin(), recs.end());
    }
    const MetricsReport report = make_report(all, rep_reference);
    auto out = open_out(rep_out);
    write_report_csv(out, report);
    write_report_text(std::cout, report);
  });

  // export-heatmap
  auto* exp = app.add_subcommand(
      "export-heatmap",
      "Write a detection heatmap (CSV, or graymap for .pgm) and a .txt sidecar.");
  std::string exp_line, exp_radars, exp_grid = "full", exp_out;
  PhysicsFlags exp_physics;
  exp->add_option("--scenario-line", exp_line, "id,jx1,jy1,jx2,jy2,jx3,jy3")->required();
  exp->add_option("--radars", exp_radars, "x1,y1;x2,y2;... (may be empty)")->required();
  exp->add_option("--grid", exp_grid)
      ->check(CLI::IsMember({"full", "training", "toy"}))
      ->capture_default_str();
  exp->add_option("--out", exp_out)->required();
  exp_physics.add(exp);
  exp->callback([&] {
    const ScenarioEntry e = scenario_from_line(exp_line);
    const RegionSpec region;
    export_heatmap(exp_physics.params(), e.scenario, parse_radar_list(exp_radars),
                   make_grid(region, parse_grid_preset(exp_grid)), exp_out);
  });

  // trace
  auto* trc = app.add_subcommand(
      "trace",
      "Run the policy on one scenario and write its episode trace.\n"
      "Output: t,action_x,action_y,radar_x,radar_y,raw_reward,shaped_reward");
  std::string trc_ckpt, trc_line, trc_out;
  PhysicsFlags trc_physics;
  trc->add_option("--checkpoint", trc_ckpt)->required();
  trc->add_option("--scenario-line", trc_line)->required();
  trc->add_option("--out", trc_out)->required();
  trc_physics.add(trc);
  trc->callback([&] {
    const Agent agent = load_checkpoint(trc_ckpt);
    const ScenarioEntry e = scenario_from_line(trc_line);
    const DeployResult r = deploy(agent, e.scenario, trc_physics.params());
    auto out = open_out(trc_out);
    write_trace_header(out);
    for (std::size_t t = 0; t < r.steps.size(); ++t) {
      write_trace_row(out, t, {r.actions[t][0], r.actions[t][1]}, r.steps[t]);
    }
    std::printf("coverage %.6f (policy grid %.6f), %.4f s\n", r.coverage,
                r.env_coverage, r.wall_time);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
