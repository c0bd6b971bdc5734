// SPDX-License-Identifier: Apache-2.0
//
// fdris: full-duplex two-RIS cell simulator and DDPG training harness
// Copyright (C) 2026 The fdris authors
// All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fdris/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fdris/errors.hpp"

namespace fdris {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLastLayerBound = 3e-3;

using nn::Activation;
using nn::Matrix;
using nn::Tape;
using NodeId = Tape::NodeId;

std::vector<double> column_values(const Matrix& m, Eigen::Index col) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, col);
  return out;
}

double clip_unit(double v) { return std::clamp(v, -1.0, 1.0); }

std::vector<cplx> assemble_unit(const std::vector<double>& re, const std::vector<double>& im) {
  std::vector<cplx> w(re.size());
  double n2 = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) {
    w[i] = {re[i], im[i]};
    n2 += std::norm(w[i]);
  }
  if (n2 == 0.0 || !std::isfinite(n2)) {
    w.assign(re.size(), 0.0);
    if (!w.empty()) w[0] = 1.0;
    return w;
  }
  const double n = std::sqrt(n2);
  for (auto& x : w) x /= n;
  return w;
}

double continuous_phase(double a) {
  double theta = kPi * (clip_unit(a) + 1.0);
  if (theta >= 2.0 * kPi) theta -= 2.0 * kPi;
  return theta;
}

std::vector<double> expand(const std::vector<double>& group_phases, const GroupLayout& layout) {
  if (layout.is_identity()) return group_phases;
  return group_expand(group_phases, layout);
}

template <class Net>
void step_adam(nn::Adam& opt, Net& params, Net& grads) {
  auto p = nn::param_pointers(params);
  auto g = nn::param_pointers(grads);
  std::vector<const Matrix*> gc(g.begin(), g.end());
  opt.step(p, gc);
}

template <class Net>
Net zeroed(Net net) {
  nn::zero_grads(net);
  return net;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("soft_update: lambda must lie in (0, 1]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Grouping

bool GroupLayout::is_identity() const {
  if (groups != element_group.size()) return false;
  for (std::size_t i = 0; i < element_group.size(); ++i)
    if (element_group[i] != i) return false;
  return true;
}

GroupLayout GroupLayout::identity(std::size_t n) {
  GroupLayout g;
  g.groups = n;
  g.element_group.resize(n);
  std::iota(g.element_group.begin(), g.element_group.end(), std::size_t{0});
  return g;
}

GroupLayout GroupLayout::blocks(std::size_t nv, std::size_t nh, std::size_t groups) {
  if (nv == 0 || nh == 0 || groups == 0) {
    throw std::invalid_argument("group layout: panel sizes and group count must be positive");
  }
  std::size_t best_v = 0;
  std::size_t best_h = 0;
  for (std::size_t gv = 1; gv <= nv; ++gv) {
    if (nv % gv != 0 || groups % gv != 0) continue;
    const std::size_t gh = groups / gv;
    if (gh == 0 || nh % gh != 0) continue;
    const auto spread = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
    if (best_v == 0 || spread(gv, gh) < spread(best_v, best_h)) {
      best_v = gv;
      best_h = gh;
    }
  }
  if (best_v == 0) {
    throw std::invalid_argument("group layout: " + std::to_string(groups) +
                                " groups do not tile a " + std::to_string(nv) + "x" +
                                std::to_string(nh) + " panel with rectangular blocks");
  }
  const std::size_t bv = nv / best_v;
  const std::size_t bh = nh / best_h;
  GroupLayout g;
  g.groups = groups;
  g.element_group.resize(nv * nh);
  for (std::size_t r = 0; r < nv; ++r)
    for (std::size_t c = 0; c < nh; ++c) g.element_group[r * nh + c] = (r / bv) * best_h + c / bh;
  return g;
}

void GroupLayout::validate() const {
  if (groups == 0 || element_group.empty()) throw std::invalid_argument("group layout: empty");
  std::vector<bool> seen(groups, false);
  for (std::size_t e : element_group) {
    if (e >= groups) throw std::invalid_argument("group layout: group index out of range");
    seen[e] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("group layout: a group owns no element");
  }
}

std::vector<double> group_expand(std::span<const double> group_phases, const GroupLayout& layout) {
  layout.validate();
  if (group_phases.size() != layout.groups) {
    throw DimensionError("group_expand: expected " + std::to_string(layout.groups) + " phases");
  }
  std::vector<double> out(layout.elements());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = group_phases[layout.element_group[n]];
  return out;
}

// ---------------------------------------------------------------------------
// Spec and parameters

ActorSpec ActorSpec::for_layout(const FeatureLayout& layout) {
  ActorSpec s;
  s.layout = layout;
  s.groups_u = GroupLayout::identity(layout.n1);
  s.groups_d = GroupLayout::identity(layout.n2);
  return s;
}

std::size_t ActorSpec::output_dim() const {
  return phase_width(groups_u.groups) + phase_width(groups_d.groups) +
         (beamformer_heads ? 2 * layout.mt + 2 * layout.mr : 0) + 2;
}

void ActorSpec::validate() const {
  if (hidden == 0 || layers == 0) throw std::invalid_argument("actor: hidden width and depth >= 1");
  if (phase_mode == PhaseMode::quantized && (bits < 1 || bits > 8)) {
    throw std::invalid_argument("actor: quantized phases need 1 <= bits <= 8");
  }
  groups_u.validate();
  groups_d.validate();
  if (groups_u.elements() != layout.n1 || groups_d.elements() != layout.n2) {
    throw std::invalid_argument("actor: group layouts do not cover the RIS panels");
  }
}

ActorParams ActorParams::init(const ActorSpec& spec, Rng& rng) {
  spec.validate();
  ActorParams p;
  std::size_t in = spec.layout.state_dim();
  for (std::size_t l = 0; l < spec.layers; ++l) {
    p.trunk.push_back(nn::init_glorot(in, spec.hidden, rng));
    p.norms.push_back(nn::init_layer_norm(spec.hidden));
    in = spec.hidden;
  }
  const std::size_t d = spec.hidden;
  p.phase_u = nn::init_small_uniform(d, spec.phase_width(spec.groups_u.groups), kLastLayerBound, rng);
  p.phase_d = nn::init_small_uniform(d, spec.phase_width(spec.groups_d.groups), kLastLayerBound, rng);
  if (spec.beamformer_heads) {
    const std::array<std::size_t, 4> sizes{spec.layout.mt, spec.layout.mt, spec.layout.mr,
                                           spec.layout.mr};
    for (std::size_t m : sizes) {
      BeamHead h;
      h.inner = nn::init_glorot(d, m, rng);
      h.outer = nn::init_small_uniform(m, m, kLastLayerBound, rng);
      p.beams.push_back(std::move(h));
    }
  }
  p.power_a = nn::init_small_uniform(d, 1, kLastLayerBound, rng);
  p.power_u = nn::init_small_uniform(d, 1, kLastLayerBound, rng);
  return p;
}

ActorParams ActorParams::zeros() const { return zeroed(*this); }

CriticParams CriticParams::init(std::size_t input_dim, std::size_t hidden, Rng& rng) {
  CriticParams c;
  c.hidden1 = nn::init_glorot(input_dim, hidden, rng);
  c.hidden2 = nn::init_glorot(hidden, hidden, rng);
  c.out = nn::init_small_uniform(hidden, 1, kLastLayerBound, rng);
  return c;
}

CriticParams CriticParams::zeros() const { return zeroed(*this); }

// ---------------------------------------------------------------------------
// Forward passes

ActorHeads actor_forward(Tape& tape, const ActorParams& params, ActorParams* grad,
                         const ActorSpec& spec, NodeId state) {
  if (static_cast<std::size_t>(tape.value(state).rows()) != spec.layout.state_dim()) {
    throw DimensionError("actor_forward: state has " + std::to_string(tape.value(state).rows()) +
                         " rows, expected " + std::to_string(spec.layout.state_dim()));
  }
  NodeId h = state;
  for (std::size_t l = 0; l < params.trunk.size(); ++l) {
    h = tape.dense(params.trunk[l], grad ? &grad->trunk[l] : nullptr, h);
    h = tape.layer_norm(params.norms[l], grad ? &grad->norms[l] : nullptr, h);
    h = tape.activation(Activation::relu, h);
  }

  ActorHeads heads;
  auto phase_head = [&](const nn::DenseLayer& layer, nn::DenseLayer* g) {
    const NodeId z = tape.dense(layer, g, h);
    if (spec.phase_mode == PhaseMode::quantized) return tape.block_softmax(z, spec.levels());
    return tape.activation(Activation::tanh, z);
  };
  heads.phase_u = phase_head(params.phase_u, grad ? &grad->phase_u : nullptr);
  heads.phase_d = phase_head(params.phase_d, grad ? &grad->phase_d : nullptr);

  if (!params.beams.empty()) {
    std::array<NodeId, 4> b{};
    for (std::size_t i = 0; i < 4; ++i) {
      BeamHead* g = grad ? &grad->beams[i] : nullptr;
      NodeId z = tape.dense(params.beams[i].inner, g ? &g->inner : nullptr, h);
      z = tape.activation(Activation::relu, z);
      z = tape.dense(params.beams[i].outer, g ? &g->outer : nullptr, z);
      b[i] = tape.activation(Activation::tanh, z);
    }
    heads.beams = b;
  }

  heads.power_a = tape.activation(Activation::tanh,
                                  tape.dense(params.power_a, grad ? &grad->power_a : nullptr, h));
  heads.power_u = tape.activation(Activation::tanh,
                                  tape.dense(params.power_u, grad ? &grad->power_u : nullptr, h));
  return heads;
}

NodeId action_features_on_tape(Tape& tape, const ActorHeads& heads, const ActorSpec& spec,
                               NodeId state) {
  auto phases = [&](NodeId head, const GroupLayout& groups) {
    NodeId p = head;
    if (spec.phase_mode == PhaseMode::quantized) {
      std::vector<double> grid(spec.levels());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        grid[k] = phase_feature(2.0 * kPi * static_cast<double>(k) / static_cast<double>(grid.size()));
      }
      p = tape.grid_select(p, std::move(grid));
    }
    if (!groups.is_identity()) p = tape.gather_rows(p, groups.element_group);
    return p;
  };

  std::vector<NodeId> parts;
  parts.push_back(phases(heads.phase_u, spec.groups_u));
  parts.push_back(phases(heads.phase_d, spec.groups_d));
  if (heads.beams) {
    const auto& b = *heads.beams;
    const std::array<NodeId, 2> wt{b[0], b[1]};
    const std::array<NodeId, 2> wr{b[2], b[3]};
    parts.push_back(tape.unit_normalize(tape.concat_rows(wt)));
    parts.push_back(tape.unit_normalize(tape.concat_rows(wr)));
  } else {
    const std::size_t start = spec.layout.state_action_offset() + spec.layout.w_t_offset();
    parts.push_back(tape.slice_rows(state, start, 2 * spec.layout.mt + 2 * spec.layout.mr));
  }
  parts.push_back(heads.power_a);
  parts.push_back(heads.power_u);
  return tape.concat_rows(parts);
}

NodeId critic_forward(Tape& tape, const CriticParams& params, CriticParams* grad, NodeId state,
                      NodeId action) {
  const std::array<NodeId, 2> in{state, action};
  NodeId h = tape.concat_rows(in);
  if (static_cast<std::size_t>(tape.value(h).rows()) != params.hidden1.in_dim()) {
    throw DimensionError("critic_forward: input has " + std::to_string(tape.value(h).rows()) +
                         " rows, expected " + std::to_string(params.hidden1.in_dim()));
  }
  h = tape.activation(Activation::relu, tape.dense(params.hidden1, grad ? &grad->hidden1 : nullptr, h));
  h = tape.activation(Activation::relu, tape.dense(params.hidden2, grad ? &grad->hidden2 : nullptr, h));
  return tape.dense(params.out, grad ? &grad->out : nullptr, h);
}

RawAction actor_act(const ActorParams& params, const ActorSpec& spec, const nn::Vector& state) {
  Tape tape;
  const NodeId s = tape.input(state);
  const ActorHeads heads = actor_forward(tape, params, nullptr, spec, s);
  RawAction raw;
  raw.phase_u = column_values(tape.value(heads.phase_u), 0);
  raw.phase_d = column_values(tape.value(heads.phase_d), 0);
  if (heads.beams) {
    for (std::size_t i = 0; i < 4; ++i) raw.beams[i] = column_values(tape.value((*heads.beams)[i]), 0);
  }
  raw.p_a = tape.value(heads.power_a)(0, 0);
  raw.p_u = tape.value(heads.power_u)(0, 0);
  return raw;
}

// ---------------------------------------------------------------------------
// Exploration and scaling

double NoiseSchedule::sigma(std::size_t episode) const {
  if (horizon <= 1) return 0.0;
  const double frac = static_cast<double>(episode) / static_cast<double>(horizon - 1);
  return std::max(0.0, sigma0 * (1.0 - frac));
}

const std::vector<double>& OuProcess::sample(std::size_t n, Rng& rng) {
  if (x_.size() != n) x_.assign(n, 0.0);
  const double diffusion = sigma_ * std::sqrt(dt_);
  for (auto& x : x_) x += theta_ * (0.0 - x) * dt_ + diffusion * gaussian(rng, 1.0);
  return x_;
}

namespace {

template <class Noise>
RawAction perturb(RawAction raw, Noise&& noise) {
  std::size_t k = 0;
  auto apply = [&](std::vector<double>& v) {
    for (auto& x : v) x = clip_unit(x + noise(k++));
  };
  apply(raw.phase_u);
  apply(raw.phase_d);
  for (auto& b : raw.beams) apply(b);
  return raw;
}

std::size_t explored_count(const RawAction& raw) {
  std::size_t n = raw.phase_u.size() + raw.phase_d.size();
  for (const auto& b : raw.beams) n += b.size();
  return n;
}

}  // namespace

RawAction explore(RawAction raw, double sigma, Rng& rng) {
  if (sigma == 0.0) return raw;
  return perturb(std::move(raw), [&](std::size_t) { return gaussian(rng, sigma); });
}

RawAction explore_ou(RawAction raw, OuProcess& process, Rng& rng) {
  const auto& x = process.sample(explored_count(raw), rng);
  return perturb(std::move(raw), [&](std::size_t k) { return x[k]; });
}

std::vector<double> quantized_phase_select(std::span<const double> probs, std::size_t bits) {
  const std::size_t levels = std::size_t{1} << bits;
  if (bits == 0 || probs.size() % levels != 0) {
    throw DimensionError("quantized_phase_select: length is not a multiple of 2^bits");
  }
  std::vector<double> out(probs.size() / levels);
  for (std::size_t e = 0; e < out.size(); ++e) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < levels; ++k)
      if (probs[e * levels + k] > probs[e * levels + best]) best = k;
    out[e] = 2.0 * kPi * static_cast<double>(best) / static_cast<double>(levels);
  }
  return out;
}

Action scale_to_action(const RawAction& raw, const ActorSpec& spec) {
  auto phases = [&](const std::vector<double>& head, const GroupLayout& groups) {
    std::vector<double> g;
    if (spec.phase_mode == PhaseMode::quantized) {
      g = quantized_phase_select(head, spec.bits);
    } else {
      g.resize(head.size());
      std::transform(head.begin(), head.end(), g.begin(), continuous_phase);
    }
    return expand(g, groups);
  };
  Action a;
  a.theta_u = phases(raw.phase_u, spec.groups_u);
  a.theta_d = phases(raw.phase_d, spec.groups_d);
  if (!raw.beams[0].empty()) {
    a.w_t = assemble_unit(raw.beams[0], raw.beams[1]);
    a.w_r = assemble_unit(raw.beams[2], raw.beams[3]);
  }
  a.p_a = (clip_unit(raw.p_a) + 1.0) / 2.0 * spec.layout.limits.p_a_max;
  a.p_u = (clip_unit(raw.p_u) + 1.0) / 2.0 * spec.layout.limits.p_u_max;
  return a;
}

// ---------------------------------------------------------------------------
// Replay

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("train.gamma must lie in [0, 1)");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("train.lambda must lie in (0, 1]");
  if (buffer == 0) throw std::invalid_argument("train.buffer must be positive");
  if (batch == 0 || batch > buffer) throw std::invalid_argument("train.batch must be in [1, buffer]");
  if (update_every == 0) throw std::invalid_argument("train.update_every must be positive");
  if (!(lr_actor >= 0.0) || !(lr_critic >= 0.0)) {
    throw std::invalid_argument("learning rates must be nonnegative");
  }
}

Batch make_batch(std::span<const Experience* const> items) {
  if (items.empty()) throw DimensionError("make_batch: empty batch");
  const auto n = static_cast<Eigen::Index>(items.size());
  Batch b;
  b.states.resize(items[0]->state.size(), n);
  b.actions.resize(items[0]->action.size(), n);
  b.rewards.resize(1, n);
  b.next_states.resize(items[0]->next_state.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Experience& e = *items[static_cast<std::size_t>(i)];
    b.states.col(i) = e.state;
    b.actions.col(i) = e.action;
    b.rewards(0, i) = e.reward;
    b.next_states.col(i) = e.next_state;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer: capacity must be positive");
}

void ReplayBuffer::push(Experience e) {
  if (count_ < capacity_) {
    slots_.push_back(std::move(e));
    ++count_;
    return;
  }
  slots_[head_] = std::move(e);
  head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= count_) throw std::out_of_range("replay buffer: index out of range");
  return slots_[(head_ + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (n > count_) return {};
  std::vector<std::size_t> out;
  out.reserve(n);
  if (4 * n > count_) {
    std::vector<std::size_t> idx(count_);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, count_ - 1);
      std::swap(idx[i], idx[pick(rng)]);
      out.push_back(idx[i]);
    }
    return out;
  }
  std::uniform_int_distribution<std::size_t> pick(0, count_ - 1);
  while (out.size() < n) {
    const std::size_t k = pick(rng);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

std::optional<Batch> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (n == 0 || n > count_) return std::nullopt;
  const auto idx = sample_indices(n, rng);
  std::vector<const Experience*> items;
  items.reserve(n);
  for (std::size_t i : idx) items.push_back(&at(i));
  return make_batch(items);
}

// ---------------------------------------------------------------------------
// Updates

nn::Matrix compute_targets(const Batch& batch, const ActorParams& target_actor,
                           const CriticParams& target_critic, const ActorSpec& spec, double gamma) {
  if (batch.size() == 0) throw DimensionError("compute_targets: empty batch");
  Tape tape;
  const NodeId s = tape.input(batch.next_states);
  const ActorHeads heads = actor_forward(tape, target_actor, nullptr, spec, s);
  const NodeId a = action_features_on_tape(tape, heads, spec, s);
  const NodeId q = critic_forward(tape, target_critic, nullptr, s, a);
  return batch.rewards + gamma * tape.value(q);
}

double critic_loss(const CriticParams& critic, const Batch& batch, const nn::Matrix& y,
                   CriticParams* grad) {
  const auto n = static_cast<double>(batch.size());
  if (y.rows() != 1 || y.cols() != batch.rewards.cols()) {
    throw DimensionError("critic_loss: targets must be 1 x N");
  }
  Tape tape;
  const NodeId s = tape.input(batch.states);
  const NodeId a = tape.input(batch.actions);
  const NodeId q = critic_forward(tape, critic, grad, s, a);
  const Matrix diff = tape.value(q) - y;
  const double loss = diff.squaredNorm() / n;
  if (grad != nullptr) tape.backward(q, Matrix((2.0 / n) * diff));
  return loss;
}

double actor_objective(const ActorParams& actor, const CriticParams& critic,
                       const ActorSpec& spec, const Batch& batch, ActorParams* grad) {
  const auto n = static_cast<double>(batch.size());
  Tape tape;
  const NodeId s = tape.input(batch.states);
  const ActorHeads heads = actor_forward(tape, actor, grad, spec, s);
  const NodeId a = action_features_on_tape(tape, heads, spec, s);
  const NodeId q = critic_forward(tape, critic, nullptr, s, a);
  const double objective = tape.value(q).sum() / n;
  if (grad != nullptr) tape.backward(q, Matrix::Constant(1, tape.value(q).cols(), 1.0 / n));
  return objective;
}

double update_critic(CriticParams& critic, nn::Adam& opt, const Batch& batch, const nn::Matrix& y) {
  CriticParams grad = critic.zeros();
  const double loss = critic_loss(critic, batch, y, &grad);
  step_adam(opt, critic, grad);
  return loss;
}

double update_actor(ActorParams& actor, nn::Adam& opt, const CriticParams& critic,
                    const ActorSpec& spec, const Batch& batch) {
  ActorParams grad = actor.zeros();
  const double objective = actor_objective(actor, critic, spec, batch, &grad);
  // Adam minimizes; ascend the objective by descending its negation.
  grad.visit([](const std::string&, Matrix& m) { m = -m; });
  step_adam(opt, actor, grad);
  return objective;
}

void soft_update(ActorParams& active, ActorParams& target, double lambda) {
  check_lambda(lambda);
  nn::soft_update_params(active, target, lambda);
}

void soft_update(CriticParams& active, CriticParams& target, double lambda) {
  check_lambda(lambda);
  nn::soft_update_params(active, target, lambda);
}

// ---------------------------------------------------------------------------
// Agent

DdpgAgent::DdpgAgent(ActorSpec spec, TrainConfig config, Rng& init_rng)
    : spec_(std::move(spec)), config_(config) {
  config_.validate();
  actor_ = ActorParams::init(spec_, init_rng);
  critic_ = CriticParams::init(spec_.layout.state_dim() + spec_.layout.action_dim(), spec_.hidden,
                               init_rng);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = nn::Adam(nn::AdamConfig{config_.lr_actor});
  critic_opt_ = nn::Adam(nn::AdamConfig{config_.lr_critic});
}

DdpgAgent::UpdateStats DdpgAgent::learn(const Batch& batch) {
  UpdateStats stats;
  const Matrix y = compute_targets(batch, target_actor_, target_critic_, spec_, config_.gamma);
  stats.critic_loss = update_critic(critic_, critic_opt_, batch, y);
  stats.actor_objective = update_actor(actor_, actor_opt_, critic_, spec_, batch);
  ++updates_;
  if (updates_ % config_.update_every == 0) {
    soft_update(actor_, target_actor_, config_.lambda);
    soft_update(critic_, target_critic_, config_.lambda);
  }
  return stats;
}

namespace {

template <class Net>
void save_net(TensorArchive& ar, const std::string& prefix, const Net& net) {
  Net copy = net;
  copy.visit([&](const std::string& name, Matrix& m) { ar.add_matrix(prefix + "." + name, m); });
}

template <class Net>
void load_net(const TensorArchive& ar, const std::string& prefix, Net& net) {
  net.visit([&](const std::string& name, Matrix& m) { ar.load_matrix(prefix + "." + name, m); });
}

void save_adam(TensorArchive& ar, const std::string& prefix, const nn::Adam& opt) {
  nn::Adam copy = opt;
  ar.add_scalar(prefix + ".steps", static_cast<double>(copy.steps()));
  for (std::size_t i = 0; i < copy.first_moments().size(); ++i) {
    ar.add_matrix(prefix + ".m" + std::to_string(i), copy.first_moments()[i]);
    ar.add_matrix(prefix + ".v" + std::to_string(i), copy.second_moments()[i]);
  }
}

template <class Net>
void load_adam(const TensorArchive& ar, const std::string& prefix, nn::Adam& opt, Net& shapes) {
  const auto steps = static_cast<std::uint64_t>(ar.scalar(prefix + ".steps"));
  opt.set_steps(steps);
  opt.first_moments().clear();
  opt.second_moments().clear();
  if (steps == 0) return;
  const auto params = nn::param_pointers(shapes);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix m = Matrix::Zero(params[i]->rows(), params[i]->cols());
    Matrix v = m;
    ar.load_matrix(prefix + ".m" + std::to_string(i), m);
    ar.load_matrix(prefix + ".v" + std::to_string(i), v);
    opt.first_moments().push_back(std::move(m));
    opt.second_moments().push_back(std::move(v));
  }
}

std::vector<std::pair<std::string, double>> meta(const ActorSpec& s) {
  return {
      {"meta.state_dim", static_cast<double>(s.layout.state_dim())},
      {"meta.action_dim", static_cast<double>(s.layout.action_dim())},
      {"meta.output_dim", static_cast<double>(s.output_dim())},
      {"meta.hidden", static_cast<double>(s.hidden)},
      {"meta.layers", static_cast<double>(s.layers)},
      {"meta.quantized", s.phase_mode == PhaseMode::quantized ? 1.0 : 0.0},
      {"meta.bits", static_cast<double>(s.bits)},
      {"meta.groups_u", static_cast<double>(s.groups_u.groups)},
      {"meta.groups_d", static_cast<double>(s.groups_d.groups)},
      {"meta.beamformer_heads", s.beamformer_heads ? 1.0 : 0.0},
  };
}

}  // namespace

void DdpgAgent::save(TensorArchive& ar) const {
  for (const auto& [k, v] : meta(spec_)) ar.add_scalar(k, v);
  ar.add_scalar("config.gamma", config_.gamma);
  ar.add_scalar("config.buffer", static_cast<double>(config_.buffer));
  ar.add_scalar("config.batch", static_cast<double>(config_.batch));
  ar.add_scalar("config.lambda", config_.lambda);
  ar.add_scalar("config.update_every", static_cast<double>(config_.update_every));
  ar.add_scalar("config.lr_actor", config_.lr_actor);
  ar.add_scalar("config.lr_critic", config_.lr_critic);
  ar.add_scalar("agent.updates", static_cast<double>(updates_));
  save_net(ar, "actor", actor_);
  save_net(ar, "target_actor", target_actor_);
  save_net(ar, "critic", critic_);
  save_net(ar, "target_critic", target_critic_);
  save_adam(ar, "adam_actor", actor_opt_);
  save_adam(ar, "adam_critic", critic_opt_);
}

void DdpgAgent::load(const TensorArchive& ar) {
  for (const auto& [k, v] : meta(spec_)) {
    if (ar.scalar(k) != v) {
      throw CheckpointError("checkpoint: " + k + " is " + std::to_string(ar.scalar(k)) +
                            ", this agent needs " + std::to_string(v));
    }
  }
  load_net(ar, "actor", actor_);
  load_net(ar, "target_actor", target_actor_);
  load_net(ar, "critic", critic_);
  load_net(ar, "target_critic", target_critic_);
  load_adam(ar, "adam_actor", actor_opt_, actor_);
  load_adam(ar, "adam_critic", critic_opt_, critic_);
  updates_ = static_cast<std::uint64_t>(ar.scalar("agent.updates"));
}

}  // namespace fdris
