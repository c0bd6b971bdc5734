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

#pragma once

// DDPG learner with a multi-head actor.
//
// The actor trunk is a stack of dense -> layer norm -> relu blocks. Heads:
//   phases     dense + tanh per RIS (continuous) or dense + per-element
//              softmax over the 2^n phase grid (quantized)
//   beams      four heads (Re/Im of w_t and w_r), dense -> relu -> dense -> tanh
//   powers     dense + tanh for p_a and p_u
// Grouped variants emit one phase (or one distribution) per element group.
// The critic scores (state features, action features) with two relu layers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdris/checkpoint.hpp"
#include "fdris/env.hpp"
#include "fdris/features.hpp"
#include "fdris/nnet.hpp"
#include "fdris/rng.hpp"

namespace fdris {

enum class PhaseMode { continuous, quantized };

/// Partition of an nv x nh panel into equal rectangular blocks. Element
/// n = row * nh + col belongs to group element_group[n].
struct GroupLayout {
  std::size_t groups = 0;
  std::vector<std::size_t> element_group;

  std::size_t elements() const { return element_group.size(); }
  bool is_identity() const;

  static GroupLayout identity(std::size_t n);
  /// Splits the panel into `groups` blocks (gv x gh grid with gv | nv and
  /// gh | nh, the squarest such split). Throws std::invalid_argument when no
  /// such split exists.
  static GroupLayout blocks(std::size_t nv, std::size_t nh, std::size_t groups);
  /// Throws std::invalid_argument unless every group owns at least one element.
  void validate() const;
};

std::vector<double> group_expand(std::span<const double> group_phases, const GroupLayout& layout);

struct ActorSpec {
  FeatureLayout layout;
  std::size_t hidden = 100;
  std::size_t layers = 2;
  PhaseMode phase_mode = PhaseMode::continuous;
  std::size_t bits = 0;
  GroupLayout groups_u;
  GroupLayout groups_d;
  bool beamformer_heads = true;

  /// Continuous ungrouped spec for the given layout.
  static ActorSpec for_layout(const FeatureLayout& layout);

  std::size_t levels() const { return std::size_t{1} << bits; }
  std::size_t phase_width(std::size_t group_count) const {
    return phase_mode == PhaseMode::quantized ? group_count * levels() : group_count;
  }
  std::size_t output_dim() const;
  void validate() const;
};

struct BeamHead {
  nn::DenseLayer inner;
  nn::DenseLayer outer;
};

struct ActorParams {
  std::vector<nn::DenseLayer> trunk;
  std::vector<nn::LayerNormParams> norms;
  nn::DenseLayer phase_u;
  nn::DenseLayer phase_d;
  std::vector<BeamHead> beams;  // Re w_t, Im w_t, Re w_r, Im w_r; empty when disabled
  nn::DenseLayer power_a;
  nn::DenseLayer power_u;

  static ActorParams init(const ActorSpec& spec, Rng& rng);
  ActorParams zeros() const;

  template <class F>
  void visit(F&& f) {
    for (std::size_t i = 0; i < trunk.size(); ++i) {
      trunk[i].visit("trunk" + std::to_string(i), f);
      norms[i].visit("norm" + std::to_string(i), f);
    }
    phase_u.visit("phase_u", f);
    phase_d.visit("phase_d", f);
    for (std::size_t i = 0; i < beams.size(); ++i) {
      beams[i].inner.visit("beam" + std::to_string(i) + ".inner", f);
      beams[i].outer.visit("beam" + std::to_string(i) + ".outer", f);
    }
    power_a.visit("power_a", f);
    power_u.visit("power_u", f);
  }
};

struct CriticParams {
  nn::DenseLayer hidden1;
  nn::DenseLayer hidden2;
  nn::DenseLayer out;

  static CriticParams init(std::size_t input_dim, std::size_t hidden, Rng& rng);
  CriticParams zeros() const;

  template <class F>
  void visit(F&& f) {
    hidden1.visit("hidden1", f);
    hidden2.visit("hidden2", f);
    out.visit("out", f);
  }
};

/// Tape nodes of the actor heads; beams is unset without beamformer heads.
struct ActorHeads {
  nn::Tape::NodeId phase_u = 0;
  nn::Tape::NodeId phase_d = 0;
  std::optional<std::array<nn::Tape::NodeId, 4>> beams;
  nn::Tape::NodeId power_a = 0;
  nn::Tape::NodeId power_u = 0;
};

ActorHeads actor_forward(nn::Tape& tape, const ActorParams& params, ActorParams* grad,
                         const ActorSpec& spec, nn::Tape::NodeId state);

/// Action features (see features.hpp) as a differentiable function of the
/// heads. Quantized phases pass through Tape::grid_select; without beamformer
/// heads the beamformer block is copied from the state's previous action.
nn::Tape::NodeId action_features_on_tape(nn::Tape& tape, const ActorHeads& heads,
                                         const ActorSpec& spec, nn::Tape::NodeId state);

nn::Tape::NodeId critic_forward(nn::Tape& tape, const CriticParams& params, CriticParams* grad,
                                nn::Tape::NodeId state, nn::Tape::NodeId action);

/// Head outputs for one sample.
struct RawAction {
  std::vector<double> phase_u;  // tanh values or concatenated probability blocks
  std::vector<double> phase_d;
  std::array<std::vector<double>, 4> beams;  // empty without beamformer heads
  double p_a = 0.0;
  double p_u = 0.0;
};

RawAction actor_act(const ActorParams& params, const ActorSpec& spec, const nn::Vector& state);

struct NoiseSchedule {
  enum class Kind { gaussian_decay, ou };
  Kind kind = Kind::gaussian_decay;
  double sigma0 = 0.3;
  std::size_t horizon = 100;  // episodes
  double ou_theta = 0.15;
  double ou_sigma = 0.3;
  double ou_dt = 1.0;

  /// Gaussian standard deviation for a 0-based episode index: sigma0 at the
  /// first episode, falling linearly to 0 at episode horizon - 1.
  double sigma(std::size_t episode) const;
};

/// Ornstein-Uhlenbeck process over every explored component.
class OuProcess {
 public:
  OuProcess() = default;
  OuProcess(double theta, double sigma, double dt) : theta_(theta), sigma_(sigma), dt_(dt) {}
  void reset() { x_.clear(); }
  /// Advances the process and returns the state; sized on first use.
  const std::vector<double>& sample(std::size_t n, Rng& rng);

 private:
  double theta_ = 0.15;
  double sigma_ = 0.3;
  double dt_ = 1.0;
  std::vector<double> x_;
};

/// Adds i.i.d. N(0, sigma) to phase and beamformer outputs and clips to
/// [-1, 1]. Power heads are left untouched.
RawAction explore(RawAction raw, double sigma, Rng& rng);
/// Same components, perturbed by the OU process instead.
RawAction explore_ou(RawAction raw, OuProcess& process, Rng& rng);

/// Per element the grid phase (2 pi / 2^n) k of the most likely k, ties to
/// the lowest k.
std::vector<double> quantized_phase_select(std::span<const double> probs, std::size_t bits);

/// Maps raw outputs to an Action. Without beamformer heads w_t and w_r are
/// left empty for a closed-form beamformer to fill.
Action scale_to_action(const RawAction& raw, const ActorSpec& spec);

struct TrainConfig {
  double gamma = 0.6;
  std::size_t buffer = 10000;
  std::size_t batch = 64;
  double lambda = 0.005;
  std::size_t update_every = 1;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;

  void validate() const;
};

struct Experience {
  nn::Vector state;
  nn::Vector action;
  double reward = 0.0;
  nn::Vector next_state;
};

struct Batch {
  nn::Matrix states;       // state_dim x N
  nn::Matrix actions;      // action_dim x N
  nn::Matrix rewards;      // 1 x N
  nn::Matrix next_states;  // state_dim x N

  std::size_t size() const { return static_cast<std::size_t>(rewards.cols()); }
};

Batch make_batch(std::span<const Experience* const> items);

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const noexcept { return count_; }
  std::size_t capacity() const noexcept { return capacity_; }
  /// i-th stored experience, oldest first.
  const Experience& at(std::size_t i) const;
  /// Uniform sample without replacement; nullopt while fewer than n are stored.
  std::optional<Batch> sample(std::size_t n, Rng& rng) const;
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest experience
  std::size_t count_ = 0;
  std::vector<Experience> slots_;
};

/// y_i = r_i + gamma * C'(s'_i, A'(s'_i)).
nn::Matrix compute_targets(const Batch& batch, const ActorParams& target_actor,
                           const CriticParams& target_critic, const ActorSpec& spec, double gamma);

/// Mean squared Bellman error; parameter gradients are accumulated into
/// `grad` when it is non-null.
double critic_loss(const CriticParams& critic, const Batch& batch, const nn::Matrix& y,
                   CriticParams* grad);
/// Mean critic value of the actor's own actions; gradient w.r.t. the actor
/// parameters accumulated into `grad` when non-null.
double actor_objective(const ActorParams& actor, const CriticParams& critic,
                       const ActorSpec& spec, const Batch& batch, ActorParams* grad);

double update_critic(CriticParams& critic, nn::Adam& opt, const Batch& batch, const nn::Matrix& y);
double update_actor(ActorParams& actor, nn::Adam& opt, const CriticParams& critic,
                    const ActorSpec& spec, const Batch& batch);

/// target <- lambda * active + (1 - lambda) * target; lambda must be in (0, 1].
void soft_update(ActorParams& active, ActorParams& target, double lambda);
void soft_update(CriticParams& active, CriticParams& target, double lambda);

class DdpgAgent {
 public:
  DdpgAgent(ActorSpec spec, TrainConfig config, Rng& init_rng);

  RawAction act(const nn::Vector& state) const { return actor_act(actor_, spec_, state); }

  struct UpdateStats {
    double critic_loss = 0.0;
    double actor_objective = 0.0;
  };
  /// Targets, critic step, actor step, then a soft target update every
  /// update_every calls.
  UpdateStats learn(const Batch& batch);

  const ActorSpec& spec() const noexcept { return spec_; }
  const TrainConfig& config() const noexcept { return config_; }
  ActorParams& actor() noexcept { return actor_; }
  ActorParams& target_actor() noexcept { return target_actor_; }
  CriticParams& critic() noexcept { return critic_; }
  CriticParams& target_critic() noexcept { return target_critic_; }
  const ActorParams& actor() const noexcept { return actor_; }
  std::uint64_t updates() const noexcept { return updates_; }

  void save(TensorArchive& archive) const;
  /// Throws CheckpointError when the archive was written for other shapes.
  void load(const TensorArchive& archive);

 private:
  ActorSpec spec_;
  TrainConfig config_;
  ActorParams actor_;
  ActorParams target_actor_;
  CriticParams critic_;
  CriticParams target_critic_;
  nn::Adam actor_opt_;
  nn::Adam critic_opt_;
  std::uint64_t updates_ = 0;
};

}  // namespace fdris
