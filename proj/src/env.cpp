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

#include "fdris/env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fdris/errors.hpp"

namespace fdris {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm_sq(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

void check_unit(const std::vector<cplx>& w, std::size_t expected, const char* name) {
  if (w.size() != expected) {
    throw ActionError(std::string("action: ") + name + " has " + std::to_string(w.size()) +
                      " entries, expected " + std::to_string(expected));
  }
  const double n = std::sqrt(norm_sq(w));
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9) {
    throw ActionError(std::string("action: ") + name + " is not unit norm (norm " +
                      std::to_string(n) + ")");
  }
}

void check_phases(const std::vector<double>& theta, std::size_t expected, const char* name) {
  if (theta.size() != expected) {
    throw ActionError(std::string("action: ") + name + " has " + std::to_string(theta.size()) +
                      " entries, expected " + std::to_string(expected));
  }
  for (double t : theta) {
    if (!(t >= 0.0 && t < kTwoPi)) {
      throw ActionError(std::string("action: ") + name + " phase " + std::to_string(t) +
                        " outside [0, 2pi)");
    }
  }
}

std::vector<cplx> random_unit(std::size_t m, Rng& rng) {
  std::vector<cplx> w(m);
  for (auto& x : w) {
    const double re = uniform(rng, -1.0, 1.0);
    const double im = uniform(rng, -1.0, 1.0);
    x = {re, im};
  }
  const double n = std::sqrt(norm_sq(w));
  if (n == 0.0) {
    w.assign(m, 0.0);
    w[0] = 1.0;
    return w;
  }
  for (auto& x : w) x /= n;
  return w;
}

}  // namespace

void Action::validate(const Geometry& geom, const PowerLimits& limits) const {
  check_phases(theta_u, geom.n1(), "theta_u");
  check_phases(theta_d, geom.n2(), "theta_d");
  check_unit(w_t, geom.mt, "w_t");
  check_unit(w_r, geom.mr, "w_r");
  if (!(p_a >= 0.0 && p_a <= limits.p_a_max)) {
    throw ActionError("action: p_a = " + std::to_string(p_a) + " outside [0, p_a_max]");
  }
  if (!(p_u >= 0.0 && p_u <= limits.p_u_max)) {
    throw ActionError("action: p_u = " + std::to_string(p_u) + " outside [0, p_u_max]");
  }
}

std::vector<double> State::flatten() const {
  std::vector<double> out;
  out.reserve(2 + prev.theta_u.size() + prev.theta_d.size() + 2 * prev.w_t.size() +
              2 * prev.w_r.size() + 2 + 4);
  out.push_back(gamma_bs);
  out.push_back(gamma_dl);
  out.insert(out.end(), prev.theta_u.begin(), prev.theta_u.end());
  out.insert(out.end(), prev.theta_d.begin(), prev.theta_d.end());
  for (const auto& x : prev.w_t) out.push_back(x.real());
  for (const auto& x : prev.w_t) out.push_back(x.imag());
  for (const auto& x : prev.w_r) out.push_back(x.real());
  for (const auto& x : prev.w_r) out.push_back(x.imag());
  out.push_back(prev.p_a);
  out.push_back(prev.p_u);
  if (positions) out.insert(out.end(), positions->begin(), positions->end());
  return out;
}

std::size_t state_length(const Geometry& geom, bool with_positions) {
  return 2 + geom.n1() + geom.n2() + 2 * geom.mt + 2 * geom.mr + 2 + (with_positions ? 4 : 0);
}

cplx si_gain(const ComplexMatrix& h_aa, const Action& action) {
  if (h_aa.rows() != action.w_r.size() || h_aa.cols() != action.w_t.size()) {
    throw DimensionError("si_gain: H_AA shape does not match the beamformers");
  }
  cplx acc = 0.0;
  for (std::size_t r = 0; r < h_aa.rows(); ++r) {
    cplx row = 0.0;
    for (std::size_t c = 0; c < h_aa.cols(); ++c) row += h_aa(r, c) * action.w_t[c];
    acc += action.w_r[r] * row;
  }
  return acc;
}

SiEstimate lssic_estimate(const ChannelSet& channels, const Action& action, double sigma_a2,
                          Rng& rng) {
  if (!(action.p_a > 0.0)) throw PowerError("lssic_estimate: pilot needs p_A > 0");
  const cplx s{1.0, 0.0};
  const double noise_var = sigma_a2 * norm_sq(action.w_r);
  const cplx y = si_gain(channels.h_aa, action) * std::sqrt(action.p_a) * s +
                 complex_gaussian(rng, noise_var);
  const cplx h_hat = (1.0 / std::sqrt(action.p_a)) * inverse_scalar(std::conj(s) * s) *
                     std::conj(s) * y;
  return {h_hat, SiMethod::lssic};
}

SiEstimate hsic_estimate(const ComplexMatrix& h_tilde, const Action& action) {
  return {si_gain(h_tilde, action), SiMethod::hsic};
}

ComplexMatrix uplink_channel(const ChannelSet& ch, const Action& action) {
  const auto phi_u = phasors(action.theta_u);
  const auto phi_d = phasors(action.theta_d);
  ComplexMatrix u = ch.h_au;
  u += matmul(ch.f_ai, scale_rows(phi_u, ch.f_iu));
  u += matmul(transpose(ch.g_ia), scale_rows(phi_d, ch.g_iu));
  return u;
}

ComplexMatrix downlink_channel(const ChannelSet& ch, const Action& action) {
  const auto phi_u = phasors(action.theta_u);
  const auto phi_d = phasors(action.theta_d);
  ComplexMatrix d = ch.h_da;
  d += matmul(scale_cols(ch.g_di, phi_d), ch.g_ia);
  d += matmul(scale_cols(ch.f_di, phi_u), transpose(ch.f_ai));
  return d;
}

cplx interference_channel(const ChannelSet& ch, const Action& action) {
  const auto phi_u = phasors(action.theta_u);
  const auto phi_d = phasors(action.theta_d);
  return as_scalar(ch.g) + as_scalar(matmul(scale_cols(ch.g_di, phi_d), ch.g_iu)) +
         as_scalar(matmul(scale_cols(ch.f_di, phi_u), ch.f_iu));
}

SinrPair compute_sinrs(const ChannelSet& channels, const Action& action, const SiEstimate& si,
                       double sigma_a2, double sigma_d2) {
  const ComplexMatrix u = uplink_channel(channels, action);
  const ComplexMatrix d = downlink_channel(channels, action);
  if (u.rows() != action.w_r.size() || d.cols() != action.w_t.size()) {
    throw DimensionError("compute_sinrs: beamformer sizes do not match the channels");
  }
  cplx ul = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) ul += action.w_r[i] * u[i];
  cplx dl = 0.0;
  for (std::size_t i = 0; i < d.cols(); ++i) dl += d[i] * action.w_t[i];
  const cplx residual = si_gain(channels.h_aa, action) - si.h_hat;
  const cplx iu = interference_channel(channels, action);

  SinrPair out;
  out.gamma_bs = action.p_u * std::norm(ul) /
                 (action.p_a * std::norm(residual) + norm_sq(action.w_r) * sigma_a2);
  out.gamma_dl = action.p_a * std::norm(dl) / (action.p_u * std::norm(iu) + sigma_d2);
  return out;
}

double rate_bits(double gamma) { return std::log2(1.0 + gamma); }

void EnvConfig::validate() const {
  geometry.validate();
  channel.validate();
  if (geometry.mt != geometry.mr) {
    throw GeometryError("env: the reflected cross links need mt == mr (got " +
                        std::to_string(geometry.mt) + " and " + std::to_string(geometry.mr) + ")");
  }
  if (!(limits.p_a_max > 0.0) || !(limits.p_u_max > 0.0)) {
    throw std::invalid_argument("env: power limits must be positive");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("env: delta must lie in [0, 1]");
  if (!(hsic_noise_var >= 0.0)) throw std::invalid_argument("env: hsic noise must be >= 0");
  if (!(noise_bs() > 0.0) || !(noise_dl() > 0.0)) {
    throw std::invalid_argument("env: noise powers must be positive");
  }
}

Action random_initial_action(const Geometry& geom, const PowerLimits& limits, Rng& rng) {
  Action a;
  a.theta_u.resize(geom.n1());
  a.theta_d.resize(geom.n2());
  for (auto& t : a.theta_u) t = std::fmod(uniform(rng, 0.0, kTwoPi), kTwoPi);
  for (auto& t : a.theta_d) t = std::fmod(uniform(rng, 0.0, kTwoPi), kTwoPi);
  a.w_t = random_unit(geom.mt, rng);
  a.w_r = random_unit(geom.mr, rng);
  a.p_a = uniform(rng, limits.p_a_max / 3.0, 2.0 * limits.p_a_max / 3.0);
  a.p_u = uniform(rng, limits.p_u_max / 3.0, 2.0 * limits.p_u_max / 3.0);
  return a;
}

// ---------------------------------------------------------------------------

Environment::Environment(EnvConfig config, std::uint64_t master_seed, std::uint64_t run)
    : config_(std::move(config)),
      channel_rng_(make_stream(master_seed, run, Stream::channel)),
      fading_rng_(make_stream(master_seed, run, Stream::fading)),
      mobility_rng_(make_stream(master_seed, run, Stream::mobility)),
      pilot_rng_(make_stream(master_seed, run, Stream::pilot)),
      episode_rng_(make_stream(master_seed, run, Stream::episode)),
      csi_rng_(make_stream(master_seed, run, Stream::csi)) {
  config_.validate();
  fading_ = FadingState(config_.geometry, config_.channel, fading_rng_);
  mobility_ = MobilityState::start(config_.geometry.ulue, config_.geometry.dlue,
                                   config_.mobility ? 1.0 : 0.0, mobility_rng_);
  realize();
}

Geometry Environment::current_geometry() const {
  Geometry g = config_.geometry;
  g.ulue = mobility_.users[0].position;
  g.dlue = mobility_.users[1].position;
  return g;
}

std::array<Point, 2> Environment::user_positions() const {
  return {mobility_.users[0].position, mobility_.users[1].position};
}

void Environment::realize() {
  channels_ = realize_channels(current_geometry(), config_.channel, fading_, channel_rng_);
}

void Environment::pin_channels(ChannelSet channels) {
  channels.check_shapes(config_.geometry);
  channels_ = std::move(channels);
  pinned_ = true;
}

State Environment::reset() {
  if (config_.mobility && !pinned_) {
    const double half = mobility_.side / 2.0;
    Point ul = config_.geometry.ulue;
    Point dl = config_.geometry.dlue;
    ul.x += uniform(episode_rng_, -half, half);
    ul.y += uniform(episode_rng_, -half, half);
    dl.x += uniform(episode_rng_, -half, half);
    dl.y += uniform(episode_rng_, -half, half);
    mobility_ = MobilityState::start(ul, dl, 1.0, mobility_rng_, mobility_.side);
    realize();
  }
  started_ = true;
  const Action initial = random_initial_action(config_.geometry, config_.limits, episode_rng_);
  return step(initial).next_state;
}

StepOutcome Environment::step(const Action& action) {
  if (!started_) throw LifecycleError("environment: step() called before reset()");
  action.validate(config_.geometry, config_.limits);

  SiEstimate si;
  switch (config_.si) {
    case SiMethod::lssic:
      si = lssic_estimate(channels_, action, config_.noise_bs(), pilot_rng_);
      break;
    case SiMethod::hsic: {
      const ComplexMatrix h_tilde =
          channels_.h_aa + sample_rayleigh(config_.geometry.mr, config_.geometry.mt,
                                           config_.hsic_noise_var, csi_rng_);
      si = hsic_estimate(h_tilde, action);
      break;
    }
    case SiMethod::none:
      break;
  }

  const SinrPair g = compute_sinrs(channels_, action, si, config_.noise_bs(), config_.noise_dl());
  StepOutcome out;
  out.gamma_bs = g.gamma_bs;
  out.gamma_dl = g.gamma_dl;
  out.r_bs = rate_bits(g.gamma_bs);
  out.r_dl = rate_bits(g.gamma_dl);
  out.reward = config_.delta * out.r_bs + (1.0 - config_.delta) * out.r_dl;

  if (!pinned_) {
    if (config_.mobility) mobility_ = mobility_step(mobility_, mobility_rng_);
    fading_.advance(1);
    realize();
  }
  ++steps_;

  out.next_state.gamma_bs = g.gamma_bs;
  out.next_state.gamma_dl = g.gamma_dl;
  out.next_state.prev = action;
  if (config_.positions_in_state) {
    const auto p = user_positions();
    out.next_state.positions = std::array<double, 4>{p[0].x, p[0].y, p[1].x, p[1].y};
  }
  return out;
}

}  // namespace fdris
