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

// Encoder (convolution stack, dense chain, LSTM, post-LSTM MLP), actor and
// critic heads with a diagonal Gaussian over 2-D actions, and the binary
// checkpoint format.

#ifndef FARDA_POLICY_HPP_
#define FARDA_POLICY_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "farda/detection.hpp"
#include "farda/nn.hpp"

namespace farda {

struct ConvStageSpec {
  std::size_t kernel;
  std::size_t channels_out;
};

// Kernel/pool table for the heatmap encoder. Stages are applied in order as
// long as the feature map still fits the kernel and the pooling window.
inline const std::vector<ConvStageSpec>& default_conv_table() {
  static const std::vector<ConvStageSpec> table{{5, 6}, {3, 16}, {3, 10}};
  return table;
}

struct PolicyArch {
  std::size_t rows = 120;  // heatmap rows (y)
  std::size_t cols = 40;   // heatmap columns (x)
  std::size_t jammers = kDefaultJammerCount;
  std::size_t radars = kDefaultRadarCount;
  std::vector<ConvStageSpec> stages;  // stages that fit the input
  std::size_t flatten = 0;

  static PolicyArch for_grid(const GridSpec& grid,
                             std::size_t jammers = kDefaultJammerCount,
                             std::size_t radars = kDefaultRadarCount);
  std::size_t head_input() const { return 64 + 2 * jammers + 3 * radars; }
};

inline constexpr double kSigmaFloor = 1e-3;

using LstmState = nn::LstmCell::State;

struct Observation {
  const Heatmap* heatmap = nullptr;  // M_t
  std::vector<double> jammers;       // 2|J| normalized
  std::vector<double> history;       // 2|R| normalized, zero padded
  std::vector<double> turn;          // |R| one-hot
};

struct PolicyOutput {
  std::array<double, 2> mean{};
  std::array<double, 2> std{};
  std::array<double, 2> raw_std{};
  double value = 0.0;
  LstmState next;
};

// Everything the backward pass of one step needs.
struct StepCache {
  std::vector<nn::Tensor> conv_in;
  std::vector<nn::Tensor> conv_act;  // after sigmoid, before pooling
  std::vector<std::vector<std::size_t>> pool_argmax;
  std::vector<std::size_t> last_shape;
  nn::Mlp::Cache enc;
  nn::LstmCell::Cache lstm;
  nn::Mlp::Cache post;
  nn::Mlp::Cache actor;
  nn::Mlp::Cache critic;
  std::array<double, 2> raw_std{};
};

// Upstream gradients of one step's outputs.
struct StepGrad {
  std::array<double, 2> mean{};
  std::array<double, 2> std{};
  double value = 0.0;
};

double gaussian_log_prob(const std::array<double, 2>& a,
                         const std::array<double, 2>& mean,
                         const std::array<double, 2>& std);
double gaussian_entropy(const std::array<double, 2>& std);

double softplus(double x);

class PolicyNet {
 public:
  explicit PolicyNet(PolicyArch arch);
  PolicyNet(PolicyArch arch, std::uint64_t seed);

  const PolicyArch& arch() const { return arch_; }

  // Stacks [M, M'] and runs the encoder; returns H^L.
  std::vector<double> encode(const Heatmap& heatmap, double tau,
                             const LstmState& prev, LstmState& next,
                             StepCache* cache = nullptr) const;

  // Concat(H^L, J, R_t, v_t)
  std::vector<double> assemble_input(const std::vector<double>& encoded,
                                     const Observation& obs) const;

  PolicyOutput forward(const Observation& obs, double tau,
                       const LstmState& prev, StepCache* cache = nullptr) const;

  // Accumulates parameter gradients for one step. `d_next` carries the
  // gradient flowing into this step's new recurrent state and is replaced
  // with the gradient of the previous state.
  void backward(const StepCache& cache, const StepGrad& grad,
                LstmState& d_next);

  LstmState zero_state() const { return lstm_.zero_state(); }

  nn::ParameterList encoder_parameters();
  nn::ParameterList actor_parameters();
  nn::ParameterList critic_parameters();
  nn::ParameterList parameters();
  void zero_grad();

 private:
  void init(std::uint64_t seed);

  PolicyArch arch_;
  std::vector<nn::Conv2d> convs_;
  nn::Mlp enc_mlp_;
  nn::LstmCell lstm_;
  nn::Mlp post_mlp_;
  nn::Mlp actor_;
  nn::Mlp critic_;
};

struct ActResult {
  std::array<double, 2> sample{};   // unclamped draw (or the mean)
  std::array<double, 2> action{};   // clamped to [0, 1]^2 for the env
  double log_prob = 0.0;            // of `sample`
  double value = 0.0;
  PolicyOutput out;
};

// Deterministic mode returns the mean and does not touch `rng`.
ActResult act(const PolicyNet& net, const Observation& obs, double tau,
              const LstmState& prev, Rng* rng, bool deterministic);

// Network weights plus the three optimizer states (encoder, actor, critic).
struct Agent {
  PolicyNet net;
  GridSpec grid;
  nn::AdamState encoder_opt;
  nn::AdamState actor_opt;
  nn::AdamState critic_opt;

  Agent(const GridSpec& grid, std::uint64_t seed);
  Agent(PolicyNet net, const GridSpec& grid);
};

// Magic "FARDANET1", then per record: u16 name length, name, u8 rank,
// u32 dims, f64 values (all little endian); ".m"/".v" records for optimizer
// moments; trailing u64 step counter. The grid is stored as record
// "meta.grid" = [x0, y0, dx, dy, nx, ny].
void save_checkpoint(const Agent& agent, const std::string& path);
Agent load_checkpoint(const std::string& path);

using CheckpointRecords = std::map<std::string, nn::Tensor>;
CheckpointRecords read_checkpoint_records(const std::string& path,
                                          std::uint64_t* step = nullptr);

}  // namespace farda

#endif  // FARDA_POLICY_HPP_
