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

// Network-facing encodings of states and actions.
//
// Action features (length N1 + N2 + 2Mt + 2Mr + 2):
//   theta / pi - 1 per RIS element      in [-1, 1)
//   Re w_t, Im w_t, Re w_r, Im w_r       unit-norm I/Q
//   2 p_a / p_a_max - 1, 2 p_u / p_u_max - 1
// For continuous actor outputs these equal the raw tanh values, so the critic
// sees the same coordinates the actor produces.
//
// State features: log10(1 + min(gamma, 1e6)) for both SINRs, the action
// features of the previous action, then user positions / 50 when enabled.

#include <cstddef>

#include "fdris/env.hpp"
#include "fdris/nnet.hpp"

namespace fdris {

inline constexpr double kSinrClip = 1e6;
inline constexpr double kPositionScale = 50.0;

struct FeatureLayout {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t mt = 0;
  std::size_t mr = 0;
  bool positions = false;
  PowerLimits limits;

  static FeatureLayout from(const EnvConfig& config);

  std::size_t action_dim() const { return n1 + n2 + 2 * mt + 2 * mr + 2; }
  std::size_t state_dim() const { return 2 + action_dim() + (positions ? 4 : 0); }

  // Offsets inside an action feature vector.
  std::size_t theta_u_offset() const { return 0; }
  std::size_t theta_d_offset() const { return n1; }
  std::size_t w_t_offset() const { return n1 + n2; }
  std::size_t w_r_offset() const { return n1 + n2 + 2 * mt; }
  std::size_t power_offset() const { return n1 + n2 + 2 * mt + 2 * mr; }
  /// Start of the previous-action block inside a state feature vector.
  std::size_t state_action_offset() const { return 2; }
};

double sinr_feature(double gamma);
double phase_feature(double theta);

nn::Vector encode_action(const FeatureLayout& layout, const Action& action);
nn::Vector encode_state(const FeatureLayout& layout, const State& state);

}  // namespace fdris
