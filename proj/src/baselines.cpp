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

#include "fdris/baselines.hpp"

#include <cmath>
#include <numbers>

#include "fdris/errors.hpp"

namespace fdris {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void add_noise(ComplexMatrix& m, double variance, Rng& rng) {
  for (auto& x : m.entries()) x += complex_gaussian(rng, variance);
}

void corrupt_link(ComplexMatrix& m, double nmse, Rng& rng) {
  if (m.size() == 0) return;
  const double mean_power = frob_norm_sq(m) / static_cast<double>(m.size());
  add_noise(m, nmse * mean_power, rng);
}

Action phases_only(std::span<const double> theta_u, std::span<const double> theta_d) {
  Action a;
  a.theta_u.assign(theta_u.begin(), theta_u.end());
  a.theta_d.assign(theta_d.begin(), theta_d.end());
  return a;
}

std::vector<cplx> random_unit_vector(std::size_t m, Rng& rng) {
  std::vector<cplx> w(m);
  double n2 = 0.0;
  for (auto& x : w) {
    const double re = uniform(rng, -1.0, 1.0);
    const double im = uniform(rng, -1.0, 1.0);
    x = {re, im};
    n2 += std::norm(x);
  }
  if (n2 == 0.0) {
    w.assign(m, 0.0);
    w[0] = 1.0;
    return w;
  }
  for (auto& x : w) x /= std::sqrt(n2);
  return w;
}

}  // namespace

CsiView corrupt_csi(const ChannelSet& channels, const CsiNoise& noise, Rng& rng) {
  CsiView view{channels, noise};
  ChannelSet& c = view.channels;
  if (noise.nmse_db) {
    const double nmse = db_to_linear(*noise.nmse_db);
    for (ComplexMatrix* m : {&c.f_iu, &c.f_ai, &c.h_au, &c.g_ia, &c.g_iu, &c.g_di, &c.h_da,
                             &c.f_di, &c.g}) {
      corrupt_link(*m, nmse, rng);
    }
  }
  if (!noise.include_h_aa) {
    c.h_aa = ComplexMatrix(c.h_aa.rows(), c.h_aa.cols());
  } else if (noise.h_aa_noise_var > 0.0) {
    add_noise(c.h_aa, noise.h_aa_noise_var, rng);
  }
  if (noise.drop_inter_ris) {
    c.g_iu = ComplexMatrix(c.g_iu.rows(), c.g_iu.cols());
    c.f_di = ComplexMatrix(c.f_di.rows(), c.f_di.cols());
  }
  return view;
}

CsiView perfect_csi(const ChannelSet& channels) { return {channels, CsiNoise{}}; }

Action randpsbf_action(const Geometry& geom, const PowerLimits& limits, Rng& rng) {
  Action a;
  a.theta_u.resize(geom.n1());
  a.theta_d.resize(geom.n2());
  for (auto& t : a.theta_u) t = std::fmod(uniform(rng, 0.0, kTwoPi), kTwoPi);
  for (auto& t : a.theta_d) t = std::fmod(uniform(rng, 0.0, kTwoPi), kTwoPi);
  a.w_t = random_unit_vector(geom.mt, rng);
  a.w_r = random_unit_vector(geom.mr, rng);
  a.p_a = limits.p_a_max;
  a.p_u = limits.p_u_max;
  return a;
}

std::vector<cplx> mrc_receive(const CsiView& csi, std::span<const double> theta_u,
                              std::span<const double> theta_d) {
  const ComplexMatrix u = uplink_channel(csi.channels, phases_only(theta_u, theta_d));
  const double n = frob_norm(u);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateChannelError("mrc_receive: combined uplink channel is zero");
  }
  std::vector<cplx> w(u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::conj(u[i]) / n;
  return w;
}

ComplexMatrix ortho_complement_projector(const ComplexMatrix& h_aa, std::span<const cplx> w_r) {
  if (h_aa.rows() != w_r.size()) {
    throw DimensionError("ortho_complement_projector: w_R length does not match H_AA rows");
  }
  const std::size_t mt = h_aa.cols();
  const ComplexMatrix v = matmul(ComplexMatrix::row(w_r), h_aa);
  const double vv = frob_norm_sq(v);
  double wr2 = 0.0;
  for (const auto& x : w_r) wr2 += std::norm(x);
  if (!(vv > 1e-28 * frob_norm_sq(h_aa) * wr2) || vv == 0.0) return ComplexMatrix::identity(mt);
  const cplx inv = inverse_scalar(cplx(vv, 0.0));
  ComplexMatrix p = ComplexMatrix::identity(mt);
  for (std::size_t r = 0; r < mt; ++r)
    for (std::size_t c = 0; c < mt; ++c) p(r, c) -= std::conj(v[r]) * inv * v[c];
  return p;
}

std::vector<cplx> zf_transmit(const CsiView& csi, std::span<const double> theta_u,
                              std::span<const double> theta_d, std::span<const cplx> w_r) {
  const std::size_t mt = csi.channels.h_aa.cols();
  if (mt < 2) throw DimensionError("zf_transmit: zero forcing needs Mt > 1 transmit antennas");
  const ComplexMatrix d = downlink_channel(csi.channels, phases_only(theta_u, theta_d));
  const ComplexMatrix p = ortho_complement_projector(csi.channels.h_aa, w_r);
  const ComplexMatrix x = matmul(p, hermitian(d));
  const double n = frob_norm(x);
  if (!(n > 1e-12 * frob_norm(d)) || !std::isfinite(n)) {
    throw DegenerateChannelError("zf_transmit: downlink channel lies in the SI direction");
  }
  std::vector<cplx> w(mt);
  for (std::size_t i = 0; i < mt; ++i) w[i] = x[i] / n;
  return w;
}

Action perfcsi_agent_action(Action partial, const CsiView& csi) {
  partial.w_r = mrc_receive(csi, partial.theta_u, partial.theta_d);
  partial.w_t = zf_transmit(csi, partial.theta_u, partial.theta_d, partial.w_r);
  return partial;
}

}  // namespace fdris
