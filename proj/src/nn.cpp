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

#include "farda/nn.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace farda::nn {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor::Tensor(std::vector<std::size_t> dims, double fill)
    : shape(std::move(dims)), data(shape_size(shape), fill) {}

Parameter::Parameter(std::string n, std::vector<std::size_t> shape)
    : name(std::move(n)), value(shape), grad(shape) {}

void Parameter::zero_grad() {
  std::fill(grad.data.begin(), grad.data.end(), 0.0);
}

void glorot_uniform(Parameter& p, std::size_t fan_in, std::size_t fan_out,
                    Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& w : p.value.data) w = uniform(rng, -limit, limit);
}

void sigmoid_inplace(std::span<double> x) {
  for (double& v : x) v = sigmoid(v);
}

void sigmoid_backward_inplace(std::span<const double> y,
                              std::span<double> grad) {
  for (std::size_t i = 0; i < y.size(); ++i) grad[i] *= y[i] * (1.0 - y[i]);
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(const std::string& name, std::size_t kh, std::size_t kw,
               std::size_t cin, std::size_t cout)
    : weight(name + ".w", {kh, kw, cin, cout}), bias(name + ".b", {cout}) {}

void Conv2d::init(Rng& rng) {
  glorot_uniform(weight, kh() * kw() * cin(), kh() * kw() * cout(), rng);
  std::fill(bias.value.data.begin(), bias.value.data.end(), 0.0);
}

Tensor Conv2d::forward(const Tensor& in) const {
  if (in.rank() != 3 || in.shape[0] != cin()) {
    throw std::invalid_argument("conv2d: input channels do not match kernel");
  }
  const std::size_t h = in.shape[1];
  const std::size_t w = in.shape[2];
  if (h < kh() || w < kw()) {
    throw std::invalid_argument("conv2d: input smaller than kernel");
  }
  const std::size_t oh = h - kh() + 1;
  const std::size_t ow = w - kw() + 1;
  const std::size_t co_n = cout();
  const std::size_t ci_n = cin();
  Tensor out({co_n, oh, ow});
  const double* wt = weight.value.data.data();
  const double* x = in.data.data();
  std::vector<double> acc(co_n);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t xo = 0; xo < ow; ++xo) {
      std::copy(bias.value.data.begin(), bias.value.data.end(), acc.begin());
      for (std::size_t ki = 0; ki < kh(); ++ki) {
        for (std::size_t kj = 0; kj < kw(); ++kj) {
          for (std::size_t ci = 0; ci < ci_n; ++ci) {
            const double v = x[(ci * h + y + ki) * w + xo + kj];
            const double* wrow = wt + ((ki * kw() + kj) * ci_n + ci) * co_n;
            for (std::size_t co = 0; co < co_n; ++co) acc[co] += v * wrow[co];
          }
        }
      }
      for (std::size_t co = 0; co < co_n; ++co) {
        out.data[(co * oh + y) * ow + xo] = acc[co];
      }
    }
  }
  return out;
}

Tensor Conv2d::backward(const Tensor& in, const Tensor& grad_out) {
  const std::size_t h = in.shape[1];
  const std::size_t w = in.shape[2];
  const std::size_t oh = grad_out.shape[1];
  const std::size_t ow = grad_out.shape[2];
  const std::size_t co_n = cout();
  const std::size_t ci_n = cin();
  Tensor grad_in(in.shape);
  const double* wt = weight.value.data.data();
  double* gw = weight.grad.data.data();
  const double* x = in.data.data();
  std::vector<double> g(co_n);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t xo = 0; xo < ow; ++xo) {
      for (std::size_t co = 0; co < co_n; ++co) {
        g[co] = grad_out.data[(co * oh + y) * ow + xo];
        bias.grad.data[co] += g[co];
      }
      for (std::size_t ki = 0; ki < kh(); ++ki) {
        for (std::size_t kj = 0; kj < kw(); ++kj) {
          for (std::size_t ci = 0; ci < ci_n; ++ci) {
            const std::size_t xi = (ci * h + y + ki) * w + xo + kj;
            const std::size_t base = ((ki * kw() + kj) * ci_n + ci) * co_n;
            const double v = x[xi];
            double gi = 0.0;
            for (std::size_t co = 0; co < co_n; ++co) {
              gw[base + co] += v * g[co];
              gi += wt[base + co] * g[co];
            }
            grad_in.data[xi] += gi;
          }
        }
      }
    }
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Max pooling

PoolResult maxpool2(const Tensor& in) {
  if (in.rank() != 3 || in.shape[1] < 2 || in.shape[2] < 2) {
    throw std::invalid_argument("maxpool2: need C x H x W with H, W >= 2");
  }
  const std::size_t c = in.shape[0];
  const std::size_t h = in.shape[1];
  const std::size_t w = in.shape[2];
  const std::size_t oh = h / 2;
  const std::size_t ow = w / 2;
  PoolResult r{Tensor({c, oh, ow}), std::vector<std::size_t>(c * oh * ow)};
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = (ch * h + 2 * y) * w + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (ch * h + 2 * y + dy) * w + 2 * x + dx;
            if (in.data[idx] > in.data[best]) best = idx;
          }
        }
        const std::size_t o = (ch * oh + y) * ow + x;
        r.out.data[o] = in.data[best];
        r.argmax[o] = best;
      }
    }
  }
  return r;
}

Tensor maxpool2_backward(const Tensor& grad_out,
                         std::span<const std::size_t> argmax,
                         const std::vector<std::size_t>& in_shape) {
  Tensor grad_in(in_shape);
  for (std::size_t o = 0; o < grad_out.size(); ++o) {
    grad_in.data[argmax[o]] += grad_out.data[o];
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Dense / MLP

Dense::Dense(const std::string& name, std::size_t in, std::size_t out)
    : weight(name + ".w", {out, in}), bias(name + ".b", {out}) {}

void Dense::init(Rng& rng) {
  glorot_uniform(weight, in(), out(), rng);
  std::fill(bias.value.data.begin(), bias.value.data.end(), 0.0);
}

std::vector<double> Dense::forward(std::span<const double> x) const {
  const std::size_t n_in = in();
  if (x.size() != n_in) throw std::invalid_argument("dense: input size");
  std::vector<double> y(bias.value.data);
  const double* w = weight.value.data.data();
  for (std::size_t o = 0; o < y.size(); ++o) {
    const double* row = w + o * n_in;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * x[i];
    y[o] += acc;
  }
  return y;
}

std::vector<double> Dense::backward(std::span<const double> x,
                                    std::span<const double> grad_y) {
  const std::size_t n_in = in();
  std::vector<double> grad_x(n_in, 0.0);
  const double* w = weight.value.data.data();
  double* gw = weight.grad.data.data();
  for (std::size_t o = 0; o < grad_y.size(); ++o) {
    const double g = grad_y[o];
    bias.grad.data[o] += g;
    const double* row = w + o * n_in;
    double* grow = gw + o * n_in;
    for (std::size_t i = 0; i < n_in; ++i) {
      grow[i] += g * x[i];
      grad_x[i] += g * row[i];
    }
  }
  return grad_x;
}

Mlp::Mlp(const std::string& name, const std::vector<std::size_t>& sizes,
         Activation hidden, Activation output)
    : hidden_act(hidden), output_act(output) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp: need >= 2 sizes");
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    layers.emplace_back(name + "." + std::to_string(k), sizes[k],
                        sizes[k + 1]);
  }
}

std::vector<double> Mlp::forward(std::span<const double> x,
                                 Cache* cache) const {
  std::vector<double> cur(x.begin(), x.end());
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(cur);
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    cur = layers[k].forward(cur);
    const bool last = k + 1 == layers.size();
    if ((last ? output_act : hidden_act) == Activation::kSigmoid) {
      sigmoid_inplace(cur);
    }
    if (cache) cache->acts.push_back(cur);
  }
  return cur;
}

std::vector<double> Mlp::backward(const Cache& cache,
                                  std::span<const double> grad_out) {
  std::vector<double> g(grad_out.begin(), grad_out.end());
  for (std::size_t k = layers.size(); k-- > 0;) {
    const bool last = k + 1 == layers.size();
    if ((last ? output_act : hidden_act) == Activation::kSigmoid) {
      sigmoid_backward_inplace(cache.acts[k + 1], g);
    }
    g = layers[k].backward(cache.acts[k], g);
  }
  return g;
}

void Mlp::init(Rng& rng) {
  for (Dense& d : layers) d.init(rng);
}

ParameterList Mlp::parameters() {
  ParameterList out;
  for (Dense& d : layers) {
    out.push_back(&d.weight);
    out.push_back(&d.bias);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LSTM

LstmCell::LstmCell(const std::string& name, std::size_t in, std::size_t hidden)
    : weight(name + ".w", {4 * hidden, in + hidden}),
      bias(name + ".b", {4 * hidden}) {}

LstmCell::State LstmCell::zero_state() const {
  return {std::vector<double>(hidden(), 0.0),
          std::vector<double>(hidden(), 0.0)};
}

void LstmCell::init(Rng& rng) {
  const std::size_t n = hidden();
  glorot_uniform(weight, weight.value.shape[1], 4 * n, rng);
  std::fill(bias.value.data.begin(), bias.value.data.end(), 0.0);
  std::fill(bias.value.data.begin() + static_cast<std::ptrdiff_t>(n),
            bias.value.data.begin() + static_cast<std::ptrdiff_t>(2 * n), 1.0);
}

LstmCell::State LstmCell::forward(std::span<const double> x, const State& prev,
                                  Cache* cache) const {
  const std::size_t n = hidden();
  const std::size_t n_in = in();
  if (x.size() != n_in || prev.h.size() != n || prev.c.size() != n) {
    throw std::invalid_argument("lstm: state or input size");
  }
  std::vector<double> input(n_in + n);
  std::copy(x.begin(), x.end(), input.begin());
  std::copy(prev.h.begin(), prev.h.end(),
            input.begin() + static_cast<std::ptrdiff_t>(n_in));
  const std::size_t cols = n_in + n;
  std::vector<double> z(bias.value.data);
  const double* w = weight.value.data.data();
  for (std::size_t r = 0; r < 4 * n; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t k = 0; k < cols; ++k) acc += row[k] * input[k];
    z[r] += acc;
  }
  std::vector<double> gi(n), gf(n), gg(n), go(n), tc(n);
  State next{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    gi[k] = sigmoid(z[k]);
    gf[k] = sigmoid(z[n + k]);
    gg[k] = std::tanh(z[2 * n + k]);
    go[k] = sigmoid(z[3 * n + k]);
    next.c[k] = gf[k] * prev.c[k] + gi[k] * gg[k];
    tc[k] = std::tanh(next.c[k]);
    next.h[k] = go[k] * tc[k];
  }
  if (cache) {
    cache->input = std::move(input);
    cache->c_prev = prev.c;
    cache->i = std::move(gi);
    cache->f = std::move(gf);
    cache->g = std::move(gg);
    cache->o = std::move(go);
    cache->tanh_c = std::move(tc);
  }
  return next;
}

std::vector<double> LstmCell::backward(const Cache& cache,
                                       std::span<const double> dh,
                                       std::span<const double> dc_next,
                                       State& d_prev) {
  const std::size_t n = hidden();
  const std::size_t n_in = in();
  const std::size_t cols = n_in + n;
  std::vector<double> dz(4 * n);
  d_prev.c.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double tc = cache.tanh_c[k];
    const double dout = dh[k] * tc;
    const double dc = dc_next[k] + dh[k] * cache.o[k] * (1.0 - tc * tc);
    const double di = dc * cache.g[k];
    const double dg = dc * cache.i[k];
    const double df = dc * cache.c_prev[k];
    d_prev.c[k] = dc * cache.f[k];
    dz[k] = di * cache.i[k] * (1.0 - cache.i[k]);
    dz[n + k] = df * cache.f[k] * (1.0 - cache.f[k]);
    dz[2 * n + k] = dg * (1.0 - cache.g[k] * cache.g[k]);
    dz[3 * n + k] = dout * cache.o[k] * (1.0 - cache.o[k]);
  }
  std::vector<double> d_input(cols, 0.0);
  const double* w = weight.value.data.data();
  double* gw = weight.grad.data.data();
  for (std::size_t r = 0; r < 4 * n; ++r) {
    const double g = dz[r];
    bias.grad.data[r] += g;
    const double* row = w + r * cols;
    double* grow = gw + r * cols;
    for (std::size_t k = 0; k < cols; ++k) {
      grow[k] += g * cache.input[k];
      d_input[k] += g * row[k];
    }
  }
  d_prev.h.assign(d_input.begin() + static_cast<std::ptrdiff_t>(n_in),
                  d_input.end());
  d_input.resize(n_in);
  return d_input;
}

// ---------------------------------------------------------------------------
// Adam

void adam_step(const ParameterList& params, AdamState& state,
               double learning_rate) {
  if (state.m.empty()) {
    for (const Parameter* p : params) {
      state.m.emplace_back(p->value.shape);
      state.v.emplace_back(p->value.shape);
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam: parameter list changed");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    if (m.size() != p.value.size()) {
      throw std::invalid_argument("adam: moment shape mismatch for " + p.name);
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.data[i];
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g;
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m.data[i] / c1;
      const double v_hat = v.data[i] / c2;
      p.value.data[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace farda::nn
