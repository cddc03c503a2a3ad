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

#include "farda/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace farda {

PolicyArch PolicyArch::for_grid(const GridSpec& grid, std::size_t jammers,
                                std::size_t radars) {
  PolicyArch arch;
  arch.rows = grid.ny;
  arch.cols = grid.nx;
  arch.jammers = jammers;
  arch.radars = radars;
  std::size_t h = arch.rows;
  std::size_t w = arch.cols;
  std::size_t channels = 2;
  for (const ConvStageSpec& s : default_conv_table()) {
    if (h < s.kernel + 1 || w < s.kernel + 1) break;
    h = (h - s.kernel + 1) / 2;
    w = (w - s.kernel + 1) / 2;
    channels = s.channels_out;
    arch.stages.push_back(s);
  }
  arch.flatten = channels * h * w;
  return arch;
}

double softplus(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

double gaussian_log_prob(const std::array<double, 2>& a,
                         const std::array<double, 2>& mean,
                         const std::array<double, 2>& std) {
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double lp = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double z = (a[k] - mean[k]) / std[k];
    lp += -0.5 * z * z - std::log(std[k]) - half_log_two_pi;
  }
  return lp;
}

double gaussian_entropy(const std::array<double, 2>& std) {
  const double c = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return 2.0 * c + std::log(std[0]) + std::log(std[1]);
}

PolicyNet::PolicyNet(PolicyArch arch) : PolicyNet(std::move(arch), 0) {}

PolicyNet::PolicyNet(PolicyArch arch, std::uint64_t seed)
    : arch_(std::move(arch)) {
  std::size_t cin = 2;
  for (std::size_t s = 0; s < arch_.stages.size(); ++s) {
    const auto& st = arch_.stages[s];
    convs_.emplace_back("enc.conv" + std::to_string(s), st.kernel, st.kernel,
                        cin, st.channels_out);
    cin = st.channels_out;
  }
  using nn::Activation;
  enc_mlp_ = nn::Mlp("enc.mlp", {arch_.flatten, 128, 64, 64},
                     Activation::kSigmoid, Activation::kSigmoid);
  lstm_ = nn::LstmCell("enc.lstm", 64, 64);
  post_mlp_ = nn::Mlp("enc.post", {64, 64, 64}, Activation::kSigmoid,
                      Activation::kLinear);
  actor_ = nn::Mlp("actor", {arch_.head_input(), 64, 4}, Activation::kSigmoid,
                   Activation::kLinear);
  critic_ = nn::Mlp("critic", {arch_.head_input(), 64, 1},
                    Activation::kSigmoid, Activation::kLinear);
  init(seed);
}

void PolicyNet::init(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& c : convs_) c.init(rng);
  enc_mlp_.init(rng);
  lstm_.init(rng);
  post_mlp_.init(rng);
  actor_.init(rng);
  critic_.init(rng);
}

std::vector<double> PolicyNet::encode(const Heatmap& heatmap, double tau,
                                      const LstmState& prev, LstmState& next,
                                      StepCache* cache) const {
  if (heatmap.grid.ny != arch_.rows || heatmap.grid.nx != arch_.cols ||
      heatmap.values.size() != arch_.rows * arch_.cols) {
    throw std::invalid_argument("encode: heatmap does not match the network");
  }
  const std::size_t plane = arch_.rows * arch_.cols;
  nn::Tensor x({2, arch_.rows, arch_.cols});
  for (std::size_t k = 0; k < plane; ++k) {
    x.data[k] = heatmap.values[k];
    x.data[plane + k] = heatmap.values[k] >= tau ? 1.0 : 0.0;
  }
  if (cache) {
    cache->conv_in.clear();
    cache->conv_act.clear();
    cache->pool_argmax.clear();
  }
  for (const nn::Conv2d& conv : convs_) {
    nn::Tensor y = conv.forward(x);
    nn::sigmoid_inplace(y.data);
    nn::PoolResult pooled = nn::maxpool2(y);
    if (cache) {
      cache->conv_in.push_back(std::move(x));
      cache->conv_act.push_back(std::move(y));
      cache->pool_argmax.push_back(std::move(pooled.argmax));
    }
    x = std::move(pooled.out);
  }
  if (cache) cache->last_shape = x.shape;
  const std::vector<double> hc =
      enc_mlp_.forward(x.data, cache ? &cache->enc : nullptr);
  next = lstm_.forward(hc, prev, cache ? &cache->lstm : nullptr);
  return post_mlp_.forward(next.h, cache ? &cache->post : nullptr);
}

std::vector<double> PolicyNet::assemble_input(
    const std::vector<double>& encoded, const Observation& obs) const {
  if (encoded.size() != 64 || obs.jammers.size() != 2 * arch_.jammers ||
      obs.history.size() != 2 * arch_.radars ||
      obs.turn.size() != arch_.radars) {
    throw std::invalid_argument("assemble_input: dimension mismatch");
  }
  std::vector<double> xp;
  xp.reserve(arch_.head_input());
  xp.insert(xp.end(), encoded.begin(), encoded.end());
  xp.insert(xp.end(), obs.jammers.begin(), obs.jammers.end());
  xp.insert(xp.end(), obs.history.begin(), obs.history.end());
  xp.insert(xp.end(), obs.turn.begin(), obs.turn.end());
  return xp;
}

PolicyOutput PolicyNet::forward(const Observation& obs, double tau,
                                const LstmState& prev,
                                StepCache* cache) const {
  PolicyOutput out;
  const std::vector<double> hl =
      encode(*obs.heatmap, tau, prev, out.next, cache);
  const std::vector<double> xp = assemble_input(hl, obs);
  const std::vector<double> a =
      actor_.forward(xp, cache ? &cache->actor : nullptr);
  const std::vector<double> v =
      critic_.forward(xp, cache ? &cache->critic : nullptr);
  for (std::size_t k = 0; k < 2; ++k) {
    out.mean[k] = a[k];
    out.raw_std[k] = a[2 + k];
    out.std[k] = softplus(a[2 + k]) + kSigmaFloor;
  }
  out.value = v[0];
  if (cache) cache->raw_std = out.raw_std;
  return out;
}

void PolicyNet::backward(const StepCache& cache, const StepGrad& grad,
                         LstmState& d_next) {
  const std::vector<double> d_actor{
      grad.mean[0], grad.mean[1], grad.std[0] * nn::sigmoid(cache.raw_std[0]),
      grad.std[1] * nn::sigmoid(cache.raw_std[1])};
  std::vector<double> dxp = actor_.backward(cache.actor, d_actor);
  const std::vector<double> d_value{grad.value};
  const std::vector<double> dxp_c = critic_.backward(cache.critic, d_value);
  for (std::size_t k = 0; k < dxp.size(); ++k) dxp[k] += dxp_c[k];

  const std::vector<double> d_hl(dxp.begin(), dxp.begin() + 64);
  std::vector<double> dh = post_mlp_.backward(cache.post, d_hl);
  for (std::size_t k = 0; k < dh.size(); ++k) dh[k] += d_next.h[k];

  LstmState d_prev;
  const std::vector<double> dhc =
      lstm_.backward(cache.lstm, dh, d_next.c, d_prev);
  const std::vector<double> dflat = enc_mlp_.backward(cache.enc, dhc);

  nn::Tensor g(cache.last_shape);
  g.data = dflat;
  for (std::size_t s = convs_.size(); s-- > 0;) {
    g = nn::maxpool2_backward(g, cache.pool_argmax[s], cache.conv_act[s].shape);
    nn::sigmoid_backward_inplace(cache.conv_act[s].data, g.data);
    g = convs_[s].backward(cache.conv_in[s], g);
  }
  d_next = std::move(d_prev);
}

nn::ParameterList PolicyNet::encoder_parameters() {
  nn::ParameterList out;
  for (auto& c : convs_) {
    out.push_back(&c.weight);
    out.push_back(&c.bias);
  }
  for (auto* p : enc_mlp_.parameters()) out.push_back(p);
  out.push_back(&lstm_.weight);
  out.push_back(&lstm_.bias);
  for (auto* p : post_mlp_.parameters()) out.push_back(p);
  return out;
}

nn::ParameterList PolicyNet::actor_parameters() { return actor_.parameters(); }
nn::ParameterList PolicyNet::critic_parameters() {
  return critic_.parameters();
}

nn::ParameterList PolicyNet::parameters() {
  nn::ParameterList out = encoder_parameters();
  for (auto* p : actor_parameters()) out.push_back(p);
  for (auto* p : critic_parameters()) out.push_back(p);
  return out;
}

void PolicyNet::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

ActResult act(const PolicyNet& net, const Observation& obs, double tau,
              const LstmState& prev, Rng* rng, bool deterministic) {
  ActResult r;
  r.out = net.forward(obs, tau, prev);
  r.value = r.out.value;
  if (deterministic || rng == nullptr) {
    r.sample = r.out.mean;
  } else {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < 2; ++k) {
      r.sample[k] = r.out.mean[k] + r.out.std[k] * normal(*rng);
    }
  }
  r.log_prob = gaussian_log_prob(r.sample, r.out.mean, r.out.std);
  for (std::size_t k = 0; k < 2; ++k) {
    r.action[k] = std::clamp(r.sample[k], 0.0, 1.0);
  }
  return r;
}

Agent::Agent(const GridSpec& g, std::uint64_t seed)
    : net(PolicyArch::for_grid(g), seed), grid(g) {}

Agent::Agent(PolicyNet n, const GridSpec& g) : net(std::move(n)), grid(g) {}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[] = "FARDANET1";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

template <typename T>
void put_le(std::string& buf, T v) {
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    buf.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * b)) & 0xff));
  }
}

void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof v);
  put_le<std::uint64_t>(buf, bits);
}

void put_record(std::string& buf, const std::string& name,
                const nn::Tensor& t) {
  if (name.size() > 0xffff || t.rank() > 0xff) {
    throw std::invalid_argument("checkpoint record too large: " + name);
  }
  put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(name.size()));
  buf += name;
  put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(t.rank()));
  for (std::size_t d : t.shape) {
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(d));
  }
  for (double v : t.data) put_f64(buf, v);
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::size_t remaining() const { return data_.size() - pos_; }

  template <typename T>
  T get_le() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b]))
           << (8 * b);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  double get_f64() {
    const std::uint64_t bits = get_le<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw std::runtime_error("checkpoint truncated");
  }

  std::string data_;
  std::size_t pos_ = 0;
};

void append_optimizer(std::string& buf, const nn::ParameterList& params,
                      const nn::AdamState& state) {
  if (state.m.empty()) return;
  for (std::size_t k = 0; k < params.size(); ++k) {
    put_record(buf, params[k]->name + ".m", state.m[k]);
    put_record(buf, params[k]->name + ".v", state.v[k]);
  }
}

void restore_optimizer(const CheckpointRecords& records,
                       const nn::ParameterList& params, nn::AdamState& state,
                       std::uint64_t step) {
  if (params.empty() || !records.contains(params.front()->name + ".m")) return;
  state.m.clear();
  state.v.clear();
  for (const nn::Parameter* p : params) {
    const auto m = records.find(p->name + ".m");
    const auto v = records.find(p->name + ".v");
    if (m == records.end() || v == records.end() ||
        m->second.shape != p->value.shape || v->second.shape != p->value.shape) {
      throw std::runtime_error("checkpoint optimizer state missing for " +
                               p->name);
    }
    state.m.push_back(m->second);
    state.v.push_back(v->second);
  }
  state.step = step;
}

}  // namespace

void save_checkpoint(const Agent& agent, const std::string& path) {
  // Parameter lists need non-const access; nothing is modified.
  Agent& a = const_cast<Agent&>(agent);
  std::string buf(kMagic, kMagicLen);
  nn::Tensor grid({6});
  grid.data = {agent.grid.x0, agent.grid.y0, agent.grid.dx, agent.grid.dy,
               static_cast<double>(agent.grid.nx),
               static_cast<double>(agent.grid.ny)};
  put_record(buf, "meta.grid", grid);
  nn::Tensor counts({2});
  counts.data = {static_cast<double>(agent.net.arch().jammers),
                 static_cast<double>(agent.net.arch().radars)};
  put_record(buf, "meta.counts", counts);
  for (const nn::Parameter* p : a.net.parameters()) {
    put_record(buf, p->name, p->value);
  }
  append_optimizer(buf, a.net.encoder_parameters(), agent.encoder_opt);
  append_optimizer(buf, a.net.actor_parameters(), agent.actor_opt);
  append_optimizer(buf, a.net.critic_parameters(), agent.critic_opt);
  put_le<std::uint64_t>(buf, agent.actor_opt.step);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("checkpoint write failed: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move checkpoint into place: " + path +
                             ": " + ec.message());
  }
}

CheckpointRecords read_checkpoint_records(const std::string& path,
                                          std::uint64_t* step) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  Reader r(std::move(data));
  if (r.get_bytes(kMagicLen) != std::string(kMagic, kMagicLen)) {
    throw std::runtime_error("not a checkpoint (bad magic): " + path);
  }
  CheckpointRecords records;
  while (r.remaining() > sizeof(std::uint64_t)) {
    const auto name_len = r.get_le<std::uint16_t>();
    std::string name = r.get_bytes(name_len);
    const auto rank = r.get_le<std::uint8_t>();
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.get_le<std::uint32_t>();
    nn::Tensor t(shape);
    for (double& v : t.data) v = r.get_f64();
    records.emplace(std::move(name), std::move(t));
  }
  const auto counter = r.get_le<std::uint64_t>();
  if (step) *step = counter;
  return records;
}

Agent load_checkpoint(const std::string& path) {
  std::uint64_t step = 0;
  const CheckpointRecords records = read_checkpoint_records(path, &step);
  const auto grid_it = records.find("meta.grid");
  if (grid_it == records.end() || grid_it->second.size() != 6) {
    throw std::runtime_error("checkpoint has no grid record: " + path);
  }
  const auto& g = grid_it->second.data;
  GridSpec grid{g[0], g[1], g[2], g[3], static_cast<std::size_t>(g[4]),
                static_cast<std::size_t>(g[5])};
  std::size_t jammers = kDefaultJammerCount;
  std::size_t radars = kDefaultRadarCount;
  if (auto c = records.find("meta.counts"); c != records.end()) {
    jammers = static_cast<std::size_t>(c->second.data.at(0));
    radars = static_cast<std::size_t>(c->second.data.at(1));
  }
  Agent agent(PolicyNet(PolicyArch::for_grid(grid, jammers, radars)), grid);
  for (nn::Parameter* p : agent.net.parameters()) {
    const auto it = records.find(p->name);
    if (it == records.end() || it->second.shape != p->value.shape) {
      throw std::runtime_error("checkpoint parameter missing or misshaped: " +
                               p->name);
    }
    p->value = it->second;
  }
  restore_optimizer(records, agent.net.encoder_parameters(), agent.encoder_opt,
                    step);
  restore_optimizer(records, agent.net.actor_parameters(), agent.actor_opt,
                    step);
  restore_optimizer(records, agent.net.critic_parameters(), agent.critic_opt,
                    step);
  return agent;
}

}  // namespace farda
