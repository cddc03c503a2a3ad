# Copyright 2026 The farda Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Radar deployment against jamming nodes."""

from ._core import (
    Boundary,
    GridPreset,
    GridSpec,
    PhysicsParams,
    categorize,
    compute_gae,
    compute_heatmap,
    coverage,
    cvdp_penalty,
    deploy,
    detection_prob,
    efficiency,
    expr_reward,
    fuse_radars,
    generate_dataset,
    make_grid,
    noise_power,
    sample_scenario,
    signal_powers,
    solve,
    train,
)

__all__ = [
    "Boundary",
    "GridPreset",
    "GridSpec",
    "PhysicsParams",
    "categorize",
    "compute_gae",
    "compute_heatmap",
    "coverage",
    "cvdp_penalty",
    "deploy",
    "detection_prob",
    "efficiency",
    "expr_reward",
    "fuse_radars",
    "generate_dataset",
    "make_grid",
    "noise_power",
    "sample_scenario",
    "signal_powers",
    "solve",
    "train",
]
