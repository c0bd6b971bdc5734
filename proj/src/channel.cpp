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

#include "fdris/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fdris/errors.hpp"

namespace fdris {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kElevation = kPi / 2.0;

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

double azimuth(Point from, Point to) { return std::atan2(to.y - from.y, to.x - from.x); }

void Geometry::validate() const {
  if (mt == 0 || mr == 0 || n1h == 0 || n1v == 0 || n2h == 0 || n2v == 0) {
    throw GeometryError("geometry: antenna and element counts must be at least 1");
  }
  if (!finite(bs) || !finite(ris1) || !finite(ris2) || !finite(ulue) || !finite(dlue)) {
    throw GeometryError("geometry: non-finite node position");
  }
  if (!(spacing_wavelengths > 0.0)) throw GeometryError("geometry: element spacing must be positive");
}

double ChannelParams::noise_power_w() const {
  const double dbm = noise_dbm_per_hz + 10.0 * std::log10(bandwidth_hz);
  return std::pow(10.0, dbm / 10.0) * 1e-3;
}

double ChannelParams::beta_ia_linear() const { return db_to_linear(beta_ia_db); }
double ChannelParams::beta_ui_linear() const { return db_to_linear(beta_ui_db); }

void ChannelParams::validate() const {
  for (double a : {alpha_ai, alpha_iu, alpha_au, alpha_r, alpha_u}) {
    if (!(a > 0.0)) throw std::invalid_argument("channel: path-loss exponents must be positive");
  }
  if (!(sigma_aa2 >= 0.0)) throw std::invalid_argument("channel: sigma_aa2 must be nonnegative");
  if (!(carrier_hz > 0.0) || !(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("channel: carrier and bandwidth must be positive");
  }
  if (!(doppler_hz >= 0.0) || !(step_seconds > 0.0)) {
    throw std::invalid_argument("channel: doppler must be >= 0 and step interval > 0");
  }
  if (oscillators == 0) throw std::invalid_argument("channel: need at least one oscillator");
}

ScenarioPreset scenario_preset(std::string_view name) {
  if (name == "urban") return {"urban", 3.35, 3.35, 4.5, 0.05, 1.0};
  if (name == "shadowed-urban") return {"shadowed-urban", 4.5, 4.5, 4.5, 0.2, 3.16};
  throw std::invalid_argument("unknown scenario preset '" + std::string(name) + "'");
}

void apply_scenario(const ScenarioPreset& preset, ChannelParams& params) {
  params.alpha_au = preset.alpha_au;
  params.alpha_r = preset.alpha_r;
  params.alpha_u = preset.alpha_u;
}

void ChannelSet::check_shapes(const Geometry& geom) const {
  const std::size_t n1 = geom.n1();
  const std::size_t n2 = geom.n2();
  auto want = [](const ComplexMatrix& m, std::size_t r, std::size_t c, const char* name) {
    if (m.rows() != r || m.cols() != c) {
      throw DimensionError(std::string("channel set: ") + name + " has shape " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           ", expected " + std::to_string(r) + "x" + std::to_string(c));
    }
  };
  want(f_iu, n1, 1, "f_iu");
  want(f_ai, geom.mr, n1, "f_ai");
  want(h_au, geom.mr, 1, "h_au");
  want(g_ia, n2, geom.mt, "g_ia");
  want(g_iu, n2, 1, "g_iu");
  want(g_di, 1, n2, "g_di");
  want(h_da, 1, geom.mt, "h_da");
  want(f_di, 1, n1, "f_di");
  want(g, 1, 1, "g");
  want(h_aa, geom.mr, geom.mt, "h_aa");
}

ComplexMatrix steering_ula(std::size_t m, double theta, double phi, double d_over_lambda) {
  ComplexMatrix a(m, 1);
  const double step = 2.0 * kPi * d_over_lambda * std::sin(theta) * std::sin(phi);
  for (std::size_t i = 0; i < m; ++i) a[i] = std::polar(1.0, step * static_cast<double>(i));
  return a;
}

ComplexMatrix steering_upa(std::size_t nz, std::size_t nx, double theta, double phi,
                           double d_over_lambda) {
  ComplexMatrix az(nz, 1);
  ComplexMatrix ax(nx, 1);
  const double step_z = 2.0 * kPi * d_over_lambda * std::cos(theta);
  const double step_x = 2.0 * kPi * d_over_lambda * std::sin(theta) * std::cos(phi);
  for (std::size_t n = 0; n < nz; ++n) az[n] = std::polar(1.0, -step_z * static_cast<double>(n));
  for (std::size_t n = 0; n < nx; ++n) ax[n] = std::polar(1.0, -step_x * static_cast<double>(n));
  return kron(az, ax);
}

double path_loss_db(double carrier_hz, double d, double alpha) {
  if (!(d >= kReferenceDistance)) {
    throw GeometryError("path_loss_db: distance " + std::to_string(d) + " m is below D0 = 1 m");
  }
  return -20.0 * std::log10(4.0 * kPi * carrier_hz / kSpeedOfLight) -
         10.0 * alpha * std::log10(d / kReferenceDistance);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ComplexMatrix rician_mix(const ComplexMatrix& los, const ComplexMatrix& nlos, double beta_linear) {
  if (!los.same_shape(nlos)) throw DimensionError("rician_mix: LOS/NLOS shape mismatch");
  if (!(beta_linear >= 0.0)) throw std::invalid_argument("rician_mix: beta must be nonnegative");
  const double w_los = std::sqrt(beta_linear / (1.0 + beta_linear));
  const double w_nlos = std::sqrt(1.0 / (1.0 + beta_linear));
  ComplexMatrix out(los.rows(), los.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w_los * los[i] + w_nlos * nlos[i];
  return out;
}

ComplexMatrix sample_rayleigh(std::size_t rows, std::size_t cols, double variance, Rng& rng) {
  if (!(variance >= 0.0)) throw std::invalid_argument("sample_rayleigh: negative variance");
  ComplexMatrix out(rows, cols);
  for (auto& v : out.entries()) v = complex_gaussian(rng, variance);
  return out;
}

// ---------------------------------------------------------------------------
// Fading

FadingState::FadingState(const Geometry& geom, const ChannelParams& params, Rng& rng)
    : k_(params.oscillators) {
  geom.validate();
  const std::size_t n1 = geom.n1();
  const std::size_t n2 = geom.n2();
  const std::array<std::pair<std::size_t, std::size_t>, kLinkCount> shapes{{
      {n1, 1}, {geom.mr, n1}, {geom.mr, 1}, {n2, geom.mt}, {n2, 1},
      {1, n2}, {1, geom.mt}, {1, n1}, {1, 1},
  }};
  const double omega_max = 2.0 * kPi * params.doppler_hz * params.step_seconds;
  for (std::size_t l = 0; l < kLinkCount; ++l) {
    const auto [r, c] = shapes[l];
    current_[l] = ComplexMatrix(r, c);
    auto& o = osc_[l];
    o.omega.resize(r * c * k_);
    o.phase.resize(r * c * k_);
    for (std::size_t i = 0; i < o.omega.size(); ++i) {
      o.omega[i] = omega_max * std::cos(uniform(rng, -kPi, kPi));
      o.phase[i] = uniform(rng, -kPi, kPi);
    }
  }
  refresh();
}

void FadingState::advance(std::uint64_t steps) {
  if (steps == 0) return;
  step_ += steps;
  refresh();
}

void FadingState::refresh() {
  const double t = static_cast<double>(step_);
  const double norm = 1.0 / std::sqrt(static_cast<double>(k_));
  for (std::size_t l = 0; l < kLinkCount; ++l) {
    auto& m = current_[l];
    const auto& o = osc_[l];
    for (std::size_t e = 0; e < m.size(); ++e) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < k_; ++k) {
        const std::size_t i = e * k_ + k;
        acc += std::polar(1.0, o.omega[i] * t + o.phase[i]);
      }
      m[e] = norm * acc;
    }
  }
}

void jakes_advance(FadingState& state, std::uint64_t steps) { state.advance(steps); }

// ---------------------------------------------------------------------------
// Mobility

MobilityState MobilityState::start(Point ulue, Point dlue, double speed, Rng& rng, double side) {
  MobilityState s;
  s.side = side;
  const std::array<Point, 2> origin{ulue, dlue};
  for (std::size_t u = 0; u < 2; ++u) {
    s.users[u].position = origin[u];
    s.users[u].center = origin[u];
    s.users[u].heading = uniform(rng, -kPi, kPi);
    s.users[u].speed = speed;
  }
  return s;
}

namespace {

// Reflects `v` into [lo, hi]; flips `dir` for each bounce.
double reflect(double v, double lo, double hi, double& dir_sign) {
  const double width = hi - lo;
  if (width <= 0.0) return lo;
  while (v < lo || v > hi) {
    if (v > hi) v = 2.0 * hi - v;
    if (v < lo) v = 2.0 * lo - v;
    dir_sign = -dir_sign;
  }
  return v;
}

}  // namespace

MobilityState mobility_step(MobilityState state, Rng& rng) {
  const double half = state.side / 2.0;
  for (auto& u : state.users) {
    if (u.speed == 0.0) continue;
    u.heading += uniform(rng, -state.max_turn, state.max_turn);
    double dx = std::cos(u.heading);
    double dy = std::sin(u.heading);
    double sx = 1.0;
    double sy = 1.0;
    u.position.x = reflect(u.position.x + u.speed * dx, u.center.x - half, u.center.x + half, sx);
    u.position.y = reflect(u.position.y + u.speed * dy, u.center.y - half, u.center.y + half, sy);
    u.heading = std::atan2(sy * dy, sx * dx);
  }
  return state;
}

// ---------------------------------------------------------------------------
// Channel realization

namespace {

double link_amplitude(const ChannelParams& p, Point a, Point b, double alpha) {
  const double d = distance(a, b);
  if (d < 1e-9) throw GeometryError("realize_channels: coincident link endpoints");
  if (!p.path_loss_enabled) return 1.0;
  return std::sqrt(db_to_linear(path_loss_db(p.carrier_hz, std::max(d, kReferenceDistance), alpha)));
}

ComplexMatrix bs_steering(const Geometry& g, std::size_t m, Point toward) {
  return steering_ula(m, kElevation, azimuth(g.bs, toward), g.spacing_wavelengths);
}

ComplexMatrix ris_steering(const Geometry& g, std::size_t nv, std::size_t nh, Point ris,
                           Point toward) {
  return steering_upa(nv, nh, kElevation, azimuth(ris, toward), g.spacing_wavelengths);
}

ComplexMatrix scaled(double s, ComplexMatrix m) {
  m *= s;
  return m;
}

}  // namespace

ChannelSet realize_channels(const Geometry& geom, const ChannelParams& params,
                            const FadingState& fading, Rng& rng) {
  geom.validate();
  using L = FadingState::Link;
  const double b_ia = params.beta_ia_linear();
  const double b_ui = params.beta_ui_linear();
  ChannelSet ch;

  // RIS-assisted LOS links: a_rx(AoA) a_tx(AoD)^H.
  const ComplexMatrix los_f_iu = ris_steering(geom, geom.n1v, geom.n1h, geom.ris1, geom.ulue);
  const ComplexMatrix los_f_ai =
      matmul(bs_steering(geom, geom.mr, geom.ris1),
             hermitian(ris_steering(geom, geom.n1v, geom.n1h, geom.ris1, geom.bs)));
  const ComplexMatrix los_g_ia =
      matmul(ris_steering(geom, geom.n2v, geom.n2h, geom.ris2, geom.bs),
             hermitian(bs_steering(geom, geom.mt, geom.ris2)));
  const ComplexMatrix los_g_di =
      hermitian(ris_steering(geom, geom.n2v, geom.n2h, geom.ris2, geom.dlue));

  ch.f_iu = scaled(link_amplitude(params, geom.ulue, geom.ris1, params.alpha_iu),
                   rician_mix(los_f_iu, fading.nlos(L::f_iu), b_ui));
  ch.f_ai = scaled(link_amplitude(params, geom.ris1, geom.bs, params.alpha_ai),
                   rician_mix(los_f_ai, fading.nlos(L::f_ai), b_ia));
  ch.g_ia = scaled(link_amplitude(params, geom.bs, geom.ris2, params.alpha_ai),
                   rician_mix(los_g_ia, fading.nlos(L::g_ia), b_ia));
  ch.g_di = scaled(link_amplitude(params, geom.ris2, geom.dlue, params.alpha_iu),
                   rician_mix(los_g_di, fading.nlos(L::g_di), b_ui));

  // Rayleigh links.
  ch.h_au = scaled(link_amplitude(params, geom.ulue, geom.bs, params.alpha_au), fading.nlos(L::h_au));
  ch.h_da = scaled(link_amplitude(params, geom.bs, geom.dlue, params.alpha_au), fading.nlos(L::h_da));
  ch.g_iu = scaled(link_amplitude(params, geom.ulue, geom.ris2, params.alpha_r), fading.nlos(L::g_iu));
  ch.f_di = scaled(link_amplitude(params, geom.ris1, geom.dlue, params.alpha_r), fading.nlos(L::f_di));
  ch.g = scaled(link_amplitude(params, geom.ulue, geom.dlue, params.alpha_u), fading.nlos(L::g));

  ch.h_aa = sample_rayleigh(geom.mr, geom.mt, params.sigma_aa2, rng);
  ch.check_shapes(geom);
  return ch;
}

}  // namespace fdris
