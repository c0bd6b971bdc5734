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

// One-step MDP for the full-duplex two-RIS cell: apply an action, cancel
// self-interference, score SINRs and rates, and emit the next state.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fdris/channel.hpp"
#include "fdris/cnum.hpp"
#include "fdris/rng.hpp"

namespace fdris {

struct PowerLimits {
  double p_a_max = 1.0;   // BS transmit power (W)
  double p_u_max = 0.05;  // uplink user transmit power (W)
};

struct Action {
  std::vector<double> theta_u;  // RIS1 phases in [0, 2 pi)
  std::vector<double> theta_d;  // RIS2 phases in [0, 2 pi)
  std::vector<cplx> w_t;        // Mt transmit weights
  std::vector<cplx> w_r;        // Mr receive weights (applied as a row)
  double p_a = 0.0;
  double p_u = 0.0;

  /// Throws ActionError when a phase is outside [0, 2 pi), a beamformer is
  /// not unit norm (1e-9), a power is out of bounds or sizes disagree with
  /// the geometry.
  void validate(const Geometry& geom, const PowerLimits& limits) const;
};

struct State {
  double gamma_bs = 0.0;  // linear
  double gamma_dl = 0.0;  // linear
  Action prev;
  std::optional<std::array<double, 4>> positions;  // ULue x,y then DLue x,y

  /// [gamma_bs, gamma_dl, theta_u, theta_d, Re w_t, Im w_t, Re w_r, Im w_r,
  ///  p_a, p_u, positions...]
  std::vector<double> flatten() const;
};

std::size_t state_length(const Geometry& geom, bool with_positions);

enum class SiMethod { lssic, hsic, none };

struct SiEstimate {
  cplx h_hat{0.0, 0.0};
  SiMethod method = SiMethod::none;
};

struct SinrPair {
  double gamma_bs = 0.0;
  double gamma_dl = 0.0;
};

struct StepOutcome {
  State next_state;
  double reward = 0.0;
  double gamma_bs = 0.0;
  double gamma_dl = 0.0;
  double r_bs = 0.0;
  double r_dl = 0.0;
};

/// w_R H_AA w_T for the action's beamformers.
cplx si_gain(const ComplexMatrix& h_aa, const Action& action);

/// Least-squares estimate from one unit pilot received with noise of
/// variance sigma_a2 * ||w_R||^2. Throws PowerError when p_A <= 0.
SiEstimate lssic_estimate(const ChannelSet& channels, const Action& action, double sigma_a2,
                          Rng& rng);
/// w_R H_tilde w_T. Throws DimensionError when H_tilde is not Mr x Mt.
SiEstimate hsic_estimate(const ComplexMatrix& h_tilde, const Action& action);

/// Uplink combined channel h_AU + F_AI Theta_U f_IU + G_IA^T Theta_D g_IU (Mr x 1).
ComplexMatrix uplink_channel(const ChannelSet& ch, const Action& action);
/// Downlink combined channel h_DA + g_DI Theta_D G_IA + f_DI Theta_U F_AI^T (1 x Mt).
ComplexMatrix downlink_channel(const ChannelSet& ch, const Action& action);
/// User-to-user interference g + g_DI Theta_D g_IU + f_DI Theta_U f_IU.
cplx interference_channel(const ChannelSet& ch, const Action& action);

SinrPair compute_sinrs(const ChannelSet& channels, const Action& action, const SiEstimate& si,
                       double sigma_a2, double sigma_d2);

double rate_bits(double gamma);

struct EnvConfig {
  Geometry geometry;
  ChannelParams channel;
  PowerLimits limits;
  double delta = 0.5;
  SiMethod si = SiMethod::lssic;
  double hsic_noise_var = 1e-12;
  bool mobility = false;
  bool positions_in_state = false;
  // Overrides of the -174 dBm/Hz x bandwidth default when set.
  std::optional<double> sigma_a2;
  std::optional<double> sigma_d2;

  double noise_bs() const { return sigma_a2.value_or(channel.noise_power_w()); }
  double noise_dl() const { return sigma_d2.value_or(channel.noise_power_w()); }
  /// Throws std::invalid_argument or GeometryError on inconsistent settings.
  void validate() const;
};

/// Uniform random phases, U(-1,1) I/Q beamformers normalized to unit norm, and
/// powers drawn from the middle third of each power range.
Action random_initial_action(const Geometry& geom, const PowerLimits& limits, Rng& rng);

class Environment {
 public:
  Environment(EnvConfig config, std::uint64_t master_seed, std::uint64_t run);

  /// Starts an episode: re-randomizes user positions when mobility is on and
  /// executes one step with a random initial action.
  State reset();
  /// Scores `action` on the current channels, then advances mobility and
  /// fading so channels() describes the next step.
  StepOutcome step(const Action& action);

  /// Channels the next call to step() will be scored on.
  const ChannelSet& channels() const { return channels_; }
  /// Freezes the channels: step() scores on `channels` and never evolves.
  void pin_channels(ChannelSet channels);

  const EnvConfig& config() const noexcept { return config_; }
  bool started() const noexcept { return started_; }
  std::array<Point, 2> user_positions() const;
  std::uint64_t steps_taken() const noexcept { return steps_; }

 private:
  void realize();
  Geometry current_geometry() const;

  EnvConfig config_;
  Rng channel_rng_;
  Rng fading_rng_;
  Rng mobility_rng_;
  Rng pilot_rng_;
  Rng episode_rng_;
  Rng csi_rng_;
  FadingState fading_;
  MobilityState mobility_;
  ChannelSet channels_;
  bool pinned_ = false;
  bool started_ = false;
  std::uint64_t steps_ = 0;
};

}  // namespace fdris
