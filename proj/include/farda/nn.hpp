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

// Small dense-tensor layer set with hand-written backward passes: valid
// stride-1 convolution, 2x2 max pooling, sigmoid, fully connected layers,
// an LSTM cell and Adam. Backward calls accumulate into Parameter::grad.

#ifndef FARDA_NN_HPP_
#define FARDA_NN_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "farda/random.hpp"

namespace farda::nn {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

std::size_t shape_size(const std::vector<std::size_t>& shape);

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, std::vector<std::size_t> shape);
  void zero_grad();
};

using ParameterList = std::vector<Parameter*>;

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Parameter& p, std::size_t fan_in, std::size_t fan_out,
                    Rng& rng);

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

void sigmoid_inplace(std::span<double> x);
// grad_x = grad_y * y * (1 - y), written over grad_y.
void sigmoid_backward_inplace(std::span<const double> y,
                              std::span<double> grad);

// Cross-correlation of a C_in x H x W input with a k_h x k_w x C_in x C_out
// kernel, no padding, stride 1.
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, std::size_t kh, std::size_t kw,
         std::size_t cin, std::size_t cout);

  Tensor forward(const Tensor& in) const;
  Tensor backward(const Tensor& in, const Tensor& grad_out);
  void init(Rng& rng);

  std::size_t kh() const { return weight.value.shape[0]; }
  std::size_t kw() const { return weight.value.shape[1]; }
  std::size_t cin() const { return weight.value.shape[2]; }
  std::size_t cout() const { return weight.value.shape[3]; }

  Parameter weight;
  Parameter bias;
};

struct PoolResult {
  Tensor out;
  std::vector<std::size_t> argmax;  // flat input index per output element
};

// Non-overlapping 2x2 max; a trailing odd row or column is dropped.
PoolResult maxpool2(const Tensor& in);
Tensor maxpool2_backward(const Tensor& grad_out,
                         std::span<const std::size_t> argmax,
                         const std::vector<std::size_t>& in_shape);

class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, std::size_t in, std::size_t out);

  std::size_t in() const { return weight.value.shape[1]; }
  std::size_t out() const { return weight.value.shape[0]; }

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> backward(std::span<const double> x,
                               std::span<const double> grad_y);
  void init(Rng& rng);

  Parameter weight;  // out x in
  Parameter bias;
};

enum class Activation { kLinear, kSigmoid };

class Mlp {
 public:
  struct Cache {
    std::vector<std::vector<double>> acts;  // acts[0] is the input
  };

  Mlp() = default;
  Mlp(const std::string& name, const std::vector<std::size_t>& sizes,
      Activation hidden, Activation output);

  std::vector<double> forward(std::span<const double> x,
                              Cache* cache = nullptr) const;
  std::vector<double> backward(const Cache& cache,
                               std::span<const double> grad_out);
  void init(Rng& rng);
  ParameterList parameters();

  std::vector<Dense> layers;
  Activation hidden_act = Activation::kSigmoid;
  Activation output_act = Activation::kLinear;
};

class LstmCell {
 public:
  struct State {
    std::vector<double> h;
    std::vector<double> c;
  };
  struct Cache {
    std::vector<double> input;  // [x; h_prev]
    std::vector<double> c_prev;
    std::vector<double> i, f, g, o;
    std::vector<double> tanh_c;
  };

  LstmCell() = default;
  LstmCell(const std::string& name, std::size_t in, std::size_t hidden);

  std::size_t in() const { return weight.value.shape[1] - hidden(); }
  std::size_t hidden() const { return weight.value.shape[0] / 4; }
  State zero_state() const;

  // Gate order in the weight rows: input, forget, candidate, output.
  State forward(std::span<const double> x, const State& prev,
                Cache* cache = nullptr) const;
  // Takes dL/dh and dL/dc of the new state; returns dL/dx and writes the
  // gradients of the previous state.
  std::vector<double> backward(const Cache& cache, std::span<const double> dh,
                               std::span<const double> dc, State& d_prev);
  // Glorot weights, forget-gate bias 1, other biases 0.
  void init(Rng& rng);

  Parameter weight;  // 4H x (in + H)
  Parameter bias;    // 4H
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

// Bias-corrected Adam step over `params` using their grad fields.
void adam_step(const ParameterList& params, AdamState& state,
               double learning_rate);

}  // namespace farda::nn

#endif  // FARDA_NN_HPP_
