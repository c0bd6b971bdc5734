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

// Geometry, steering vectors, path loss and fading for the two-RIS cell.
//
// Node layout (meters): BS at the origin with a ULA along the y axis, RIS1
// serving the uplink user and RIS2 serving the downlink user, both panels
// parallel to the xz plane. All nodes share one height, so every elevation
// angle is pi/2 and only azimuths (measured from +x) vary.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fdris/cnum.hpp"
#include "fdris/rng.hpp"

namespace fdris {

inline constexpr double kSpeedOfLight = 2.998e8;
inline constexpr double kReferenceDistance = 1.0;  // D0 in the path-loss model

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);
/// Azimuth of the direction from `from` to `to`, measured from +x.
double azimuth(Point from, Point to);

struct Geometry {
  Point bs{0.0, 0.0};
  Point ris1{50.0, 22.0};
  Point ris2{50.0, -22.0};
  Point ulue{50.0, 20.0};
  Point dlue{50.0, -20.0};
  std::size_t mt = 10;
  std::size_t mr = 10;
  std::size_t n1h = 6;
  std::size_t n1v = 6;
  std::size_t n2h = 6;
  std::size_t n2v = 6;
  double spacing_wavelengths = 0.5;  // d_a / lambda

  std::size_t n1() const { return n1h * n1v; }
  std::size_t n2() const { return n2h * n2v; }
  /// Throws GeometryError on zero counts or non-finite positions.
  void validate() const;
};

struct ChannelParams {
  double carrier_hz = 3.5e9;
  double bandwidth_hz = 100e6;
  double noise_dbm_per_hz = -174.0;
  double beta_ia_db = 9.0;  // BS <-> RIS Rician factor
  double beta_ui_db = 6.0;  // RIS <-> user Rician factor
  double alpha_ai = 2.2;
  double alpha_iu = 2.2;
  double alpha_au = 3.35;
  double alpha_r = 3.35;
  double alpha_u = 4.5;
  double sigma_aa2 = 0.1;  // residual SI channel variance
  double doppler_hz = 100.0;
  double step_seconds = 1e-3;
  std::size_t oscillators = 16;
  bool path_loss_enabled = true;

  double noise_power_w() const;
  double beta_ia_linear() const;
  double beta_ui_linear() const;
  void validate() const;
};

struct ScenarioPreset {
  std::string name;
  double alpha_au;
  double alpha_r;
  double alpha_u;
  double p_u_max_w;
  double p_a_max_w;
};

/// "urban" or "shadowed-urban"; throws std::invalid_argument otherwise.
ScenarioPreset scenario_preset(std::string_view name);
void apply_scenario(const ScenarioPreset& preset, ChannelParams& params);

/// Every link of the cell for one time step, path loss applied.
struct ChannelSet {
  ComplexMatrix f_iu;  // N1 x 1   ULue -> RIS1
  ComplexMatrix f_ai;  // Mr x N1  RIS1 -> BS
  ComplexMatrix h_au;  // Mr x 1   ULue -> BS
  ComplexMatrix g_ia;  // N2 x Mt  BS -> RIS2
  ComplexMatrix g_iu;  // N2 x 1   ULue -> RIS2
  ComplexMatrix g_di;  // 1 x N2   RIS2 -> DLue
  ComplexMatrix h_da;  // 1 x Mt   BS -> DLue
  ComplexMatrix f_di;  // 1 x N1   RIS1 -> DLue
  ComplexMatrix g;     // 1 x 1    ULue -> DLue
  ComplexMatrix h_aa;  // Mr x Mt  BS transmit -> receive array

  /// Throws DimensionError when a shape disagrees with the geometry.
  void check_shapes(const Geometry& geom) const;
};

/// y-axis ULA: entry m is exp(j 2 pi d m sin(theta) sin(phi)).
ComplexMatrix steering_ula(std::size_t m, double theta, double phi, double d_over_lambda);
/// xz-plane UPA: kron(a_z(theta), a_x(theta, phi)), both factors conjugated
/// (entries exp(-j 2 pi d n cos(theta)) and exp(-j 2 pi d n sin(theta) cos(phi))).
ComplexMatrix steering_upa(std::size_t nz, std::size_t nx, double theta, double phi,
                           double d_over_lambda);

/// -20 log10(4 pi fc / c) - 10 alpha log10(d / D0); d below D0 is a GeometryError.
double path_loss_db(double carrier_hz, double d, double alpha);
double db_to_linear(double db);

/// sqrt(beta/(1+beta)) los + sqrt(1/(1+beta)) nlos.
ComplexMatrix rician_mix(const ComplexMatrix& los, const ComplexMatrix& nlos, double beta_linear);
ComplexMatrix sample_rayleigh(std::size_t rows, std::size_t cols, double variance, Rng& rng);

/// Sum-of-sinusoids Rayleigh process for every NLOS entry. Each entry is
/// (1/sqrt(K)) sum_k exp(j (2 pi f_D cos(a_k) t + p_k)) with random arrival
/// angles a_k and phases p_k, sampled at t = step * step_seconds.
class FadingState {
 public:
  enum Link : std::size_t { f_iu, f_ai, h_au, g_ia, g_iu, g_di, h_da, f_di, g, kLinkCount };

  FadingState() = default;
  FadingState(const Geometry& geom, const ChannelParams& params, Rng& rng);

  const ComplexMatrix& nlos(Link link) const { return current_[link]; }
  std::uint64_t step() const noexcept { return step_; }
  /// Advances the process by `steps` samples and refreshes every NLOS matrix.
  void advance(std::uint64_t steps);

 private:
  struct Oscillators {
    std::vector<double> omega;  // rad per step, entries x K
    std::vector<double> phase;
  };

  void refresh();

  std::size_t k_ = 16;
  std::uint64_t step_ = 0;
  std::array<Oscillators, kLinkCount> osc_;
  std::array<ComplexMatrix, kLinkCount> current_;
};

void jakes_advance(FadingState& state, std::uint64_t steps);

struct UserMotion {
  Point position;
  Point center;
  double heading = 0.0;
  double speed = 1.0;  // meters per step
};

/// Random-direction mobility inside a square of side `side` around each
/// user's episode-start position, with specular reflection at the edges.
struct MobilityState {
  std::array<UserMotion, 2> users;  // 0: ULue, 1: DLue
  double side = 10.0;
  double max_turn = 3.14159265358979323846 / 8.0;

  static MobilityState start(Point ulue, Point dlue, double speed, Rng& rng, double side = 10.0);
};

MobilityState mobility_step(MobilityState state, Rng& rng);

/// Builds every link from the geometry (with current user positions), the
/// fading state and the RNG used for H_AA. LOS links are Rician mixes of
/// steering-vector outer products and the fading NLOS term; the remaining
/// links are pure NLOS. Distances below D0 are floored to D0; coincident
/// endpoints are a GeometryError.
ChannelSet realize_channels(const Geometry& geom, const ChannelParams& params,
                            const FadingState& fading, Rng& rng);

}  // namespace fdris
