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

#include "fdris/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fdris/errors.hpp"

namespace fdris {

FeatureLayout FeatureLayout::from(const EnvConfig& config) {
  FeatureLayout l;
  l.n1 = config.geometry.n1();
  l.n2 = config.geometry.n2();
  l.mt = config.geometry.mt;
  l.mr = config.geometry.mr;
  l.positions = config.positions_in_state;
  l.limits = config.limits;
  return l;
}

double sinr_feature(double gamma) {
  return std::log10(1.0 + std::clamp(gamma, 0.0, kSinrClip));
}

double phase_feature(double theta) { return theta / std::numbers::pi - 1.0; }

nn::Vector encode_action(const FeatureLayout& layout, const Action& a) {
  if (a.theta_u.size() != layout.n1 || a.theta_d.size() != layout.n2 ||
      a.w_t.size() != layout.mt || a.w_r.size() != layout.mr) {
    throw DimensionError("encode_action: action sizes do not match the layout");
  }
  nn::Vector v(static_cast<Eigen::Index>(layout.action_dim()));
  Eigen::Index i = 0;
  for (double t : a.theta_u) v(i++) = phase_feature(t);
  for (double t : a.theta_d) v(i++) = phase_feature(t);
  for (const auto& x : a.w_t) v(i++) = x.real();
  for (const auto& x : a.w_t) v(i++) = x.imag();
  for (const auto& x : a.w_r) v(i++) = x.real();
  for (const auto& x : a.w_r) v(i++) = x.imag();
  v(i++) = 2.0 * a.p_a / layout.limits.p_a_max - 1.0;
  v(i++) = 2.0 * a.p_u / layout.limits.p_u_max - 1.0;
  return v;
}

nn::Vector encode_state(const FeatureLayout& layout, const State& s) {
  nn::Vector v(static_cast<Eigen::Index>(layout.state_dim()));
  v(0) = sinr_feature(s.gamma_bs);
  v(1) = sinr_feature(s.gamma_dl);
  v.segment(2, static_cast<Eigen::Index>(layout.action_dim())) = encode_action(layout, s.prev);
  if (layout.positions) {
    if (!s.positions) throw DimensionError("encode_state: layout expects user positions");
    const Eigen::Index base = static_cast<Eigen::Index>(2 + layout.action_dim());
    for (Eigen::Index k = 0; k < 4; ++k) v(base + k) = (*s.positions)[k] / kPositionScale;
  }
  return v;
}

}  // namespace fdris
