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

// Reference policies: random phases/beamformers at full power, and closed-form
// MRC receive / zero-forcing transmit beamformers from (possibly noisy) CSI.

#include <optional>
#include <span>
#include <vector>

#include "fdris/channel.hpp"
#include "fdris/env.hpp"
#include "fdris/rng.hpp"

namespace fdris {

struct CsiNoise {
  std::optional<double> nmse_db;  // unset: perfect link estimates
  double h_aa_noise_var = 0.0;    // CN variance added to every H_AA entry
  bool include_h_aa = true;       // false: the view carries H_AA = 0
  bool drop_inter_ris = false;    // zero g_IU and f_DI in the view
};

struct CsiView {
  ChannelSet channels;
  CsiNoise noise;
};

/// Adds CN(0, nmse * mean entry power) to every link (H_AA uses its own
/// variance) according to `noise`.
CsiView corrupt_csi(const ChannelSet& channels, const CsiNoise& noise, Rng& rng);
/// View equal to the true channels.
CsiView perfect_csi(const ChannelSet& channels);

/// Uniform phases, U(-1,1) I/Q beamformers normalized to unit norm, maximum powers.
Action randpsbf_action(const Geometry& geom, const PowerLimits& limits, Rng& rng);

/// w_R = u^H / ||u|| for the uplink combined channel u. Throws
/// DegenerateChannelError when u = 0.
std::vector<cplx> mrc_receive(const CsiView& csi, std::span<const double> theta_u,
                              std::span<const double> theta_d);

/// I - v^H (v v^H)^-1 v with v = w_R H_AA; the identity when v is numerically zero.
ComplexMatrix ortho_complement_projector(const ComplexMatrix& h_aa, std::span<const cplx> w_r);

/// w_T = P d^H / ||P d^H|| for the downlink combined channel d. Throws
/// DimensionError for Mt = 1 and DegenerateChannelError when P d^H = 0.
std::vector<cplx> zf_transmit(const CsiView& csi, std::span<const double> theta_u,
                              std::span<const double> theta_d, std::span<const cplx> w_r);

/// Completes an action whose phases and powers came from the learner with
/// MRC/ZF beamformers computed on `csi`.
Action perfcsi_agent_action(Action partial, const CsiView& csi);

}  // namespace fdris
