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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <tuple>
#include <utility>
#include <vector>

#include "farda/bench.hpp"
#include "farda/ppo.hpp"

namespace py = pybind11;
using namespace farda;

namespace {

using XY = std::pair<std::int64_t, std::int64_t>;

Scenario to_scenario(const std::vector<XY>& jammers) {
  Scenario s;
  for (const auto& [x, y] : jammers) s.jammers.push_back({x, y});
  return s;
}

Deployment to_deployment(const std::vector<XY>& radars) {
  Deployment d;
  for (const auto& [x, y] : radars) d.radars.push_back({x, y});
  return d;
}

std::vector<XY> to_pairs(const std::vector<Coord>& coords) {
  std::vector<XY> out;
  for (const auto& c : coords) out.emplace_back(c.x, c.y);
  return out;
}

py::array_t<double> to_array(const Heatmap& h) {
  py::array_t<double> a({h.grid.ny, h.grid.nx});
  std::memcpy(a.mutable_data(), h.values.data(), h.values.size() * sizeof(double));
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radar deployment against jamming: physics, solvers and policy.";

  py::class_<PhysicsParams>(m, "PhysicsParams")
      .def(py::init<>())
      .def_readwrite("radar_tx_power", &PhysicsParams::radar_tx_power)
      .def_readwrite("jammer_tx_power", &PhysicsParams::jammer_tx_power)
      .def_readwrite("wavelength", &PhysicsParams::wavelength)
      .def_readwrite("array_elements", &PhysicsParams::array_elements)
      .def_readwrite("bandwidth", &PhysicsParams::bandwidth)
      .def_readwrite("pulse_rate", &PhysicsParams::pulse_rate)
      .def_readwrite("room_temp", &PhysicsParams::room_temp)
      .def_readwrite("false_alarm", &PhysicsParams::false_alarm)
      .def_readwrite("noise_factor", &PhysicsParams::noise_factor)
      .def_readwrite("pulses", &PhysicsParams::pulses)
      .def_readwrite("element_spacing", &PhysicsParams::element_spacing)
      .def_readwrite("boltzmann", &PhysicsParams::boltzmann)
      .def_readwrite("threshold", &PhysicsParams::threshold)
      .def_property_readonly("tx_gain", &PhysicsParams::tx_gain)
      .def_property_readonly("rx_gain", &PhysicsParams::rx_gain)
      .def_property_readonly("angle_gate", &PhysicsParams::angle_gate)
      .def("validate", &PhysicsParams::validate);

  py::enum_<GridPreset>(m, "GridPreset")
      .value("FULL", GridPreset::kFull)
      .value("TRAINING", GridPreset::kTraining)
      .value("TOY", GridPreset::kToy);

  py::class_<GridSpec>(m, "GridSpec")
      .def_readonly("x0", &GridSpec::x0)
      .def_readonly("y0", &GridSpec::y0)
      .def_readonly("dx", &GridSpec::dx)
      .def_readonly("dy", &GridSpec::dy)
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny)
      .def("__len__", &GridSpec::size);

  m.def("make_grid", [](const std::string& name) {
    return make_grid(RegionSpec{}, parse_grid_preset(name));
  }, py::arg("preset") = "full");

  m.def("noise_power", &noise_power, py::arg("params") = PhysicsParams{});
  m.def("signal_powers", [](const PhysicsParams& p, double rd, double rj) {
    const SignalPowers s = signal_powers(p, rd, rj);
    return std::make_tuple(s.echo, s.jammer);
  }, py::arg("params"), py::arg("target_range"), py::arg("jammer_range"));
  m.def("detection_prob", &detection_prob, py::arg("params"), py::arg("sinr"));
  m.def("fuse_radars", [](const std::vector<double>& p) { return fuse_radars(p); });

  m.def("sample_scenario", [](std::uint64_t seed) {
    return to_pairs(sample_scenario(seed, RegionSpec{}).jammers);
  }, py::arg("seed"));
  m.def("generate_dataset", [](std::size_t count, std::uint64_t seed) {
    std::vector<std::pair<std::int64_t, std::vector<XY>>> out;
    for (const auto& e : generate_dataset(count, seed, RegionSpec{})) {
      out.emplace_back(e.id, to_pairs(e.scenario.jammers));
    }
    return out;
  }, py::arg("count"), py::arg("seed"));

  m.def("compute_heatmap",
        [](const std::vector<XY>& radars, const std::vector<XY>& jammers,
           const std::string& grid, const PhysicsParams& p) {
          const Heatmap h = compute_heatmap(
              p, to_deployment(radars), to_scenario(jammers),
              make_grid(RegionSpec{}, parse_grid_preset(grid)));
          return to_array(h);
        },
        py::arg("radars"), py::arg("jammers"), py::arg("grid") = "full",
        py::arg("params") = PhysicsParams{},
        "Fused detection probability, shape (ny, nx), row j at y0 + j*dy.");
  m.def("coverage",
        [](const std::vector<XY>& radars, const std::vector<XY>& jammers,
           const std::string& grid, const PhysicsParams& p) {
          return deployment_coverage(
              p, to_deployment(radars), to_scenario(jammers),
              make_grid(RegionSpec{}, parse_grid_preset(grid)));
        },
        py::arg("radars"), py::arg("jammers"), py::arg("grid") = "full",
        py::arg("params") = PhysicsParams{});

  py::class_<Boundary>(m, "Boundary")
      .def(py::init<>())
      .def_property_readonly("total_length", &Boundary::total_length)
      .def("point_at", [](const Boundary& b, double s) {
        const Vec2 p = b.point_at(s);
        return std::make_tuple(p.x, p.y);
      })
      .def("project", [](const Boundary& b, double x, double y) {
        const BoundaryProjection p = b.project({x, y});
        return std::make_tuple(p.point.x, p.point.y, p.arclength);
      })
      .def("snap", [](const Boundary& b, double x, double y) {
        const Coord c = b.snap({x, y});
        return std::make_tuple(c.x, c.y);
      });

  m.def("cvdp_penalty", [](double anchor, double tol, double a_s) {
    return cvdp_penalty(anchor, tol, a_s);
  }, py::arg("anchor"), py::arg("tolerance"), py::arg("arclength"));
  m.def("expr_reward", &expr_reward, py::arg("r"), py::arg("r_prev"));
  m.def("compute_gae",
        [](const std::vector<double>& rewards, const std::vector<double>& values,
           double gamma, double lam) {
          const GaeResult g = compute_gae(rewards, values, gamma, lam);
          return std::make_tuple(g.advantages, g.returns);
        },
        py::arg("rewards"), py::arg("values"), py::arg("gamma") = 1.0,
        py::arg("lam") = 0.95);

  m.def("efficiency", &efficiency, py::arg("coverage"), py::arg("seconds"));
  m.def("categorize", [](double ga1d, double pso1d) {
    return std::string(category_name(categorize(ga1d, pso1d)));
  }, py::arg("ga1d_coverage"), py::arg("pso1d_coverage"));

  m.def("solve",
        [](const std::string& method, const std::vector<XY>& jammers,
           std::uint64_t seed, std::size_t iterations, const PhysicsParams& p) {
          BenchConfig config;
          config.physics = p;
          config.ga.iterations = iterations;
          config.pso.iterations = iterations;
          const BenchRecord r = solve_scenario(
              parse_method(method), {0, to_scenario(jammers)}, config, seed);
          py::dict out;
          out["coverage"] = r.coverage;
          out["wall_time"] = r.wall_time;
          out["radars"] = to_pairs(r.deployment.radars);
          return out;
        },
        py::arg("method"), py::arg("jammers"), py::arg("seed"),
        py::arg("iterations") = 100, py::arg("params") = PhysicsParams{},
        "Runs ga, pso, ga1d or pso1d; coverage is on the full grid.");

  m.def("train",
        [](std::size_t episodes, std::uint64_t seed, const std::string& grid,
           const std::string& checkpoint, std::size_t epochs) {
          PPOConfig config;
          config.episodes = episodes;
          config.epochs = epochs;
          TrainOptions options;
          options.checkpoint_path = checkpoint;
          TrainResult r = [&] {
            py::gil_scoped_release release;
            return train(config, EnvConfig::for_preset(parse_grid_preset(grid)),
                         seed, options);
          }();
          std::vector<std::tuple<std::size_t, double, double>> curve;
          for (const auto& c : r.curve) {
            curve.emplace_back(c.episode, c.raw_coverage, c.shaped_return);
          }
          return curve;
        },
        py::arg("episodes"), py::arg("seed"), py::arg("grid") = "toy",
        py::arg("checkpoint") = "", py::arg("epochs") = 10,
        "Returns (episode, raw_coverage, shaped_return) per episode.");

  m.def("deploy",
        [](const std::string& checkpoint, const std::vector<XY>& jammers) {
          const Agent agent = load_checkpoint(checkpoint);
          const DeployResult r = deploy(agent, to_scenario(jammers));
          py::dict out;
          out["coverage"] = r.coverage;
          out["env_coverage"] = r.env_coverage;
          out["wall_time"] = r.wall_time;
          out["radars"] = to_pairs(r.deployment.radars);
          return out;
        },
        py::arg("checkpoint"), py::arg("jammers"));
}
