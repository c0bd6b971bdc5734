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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fdris/channel.hpp"
#include "fdris/errors.hpp"

using namespace fdris;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("ula steering") {
  CHECK(steering_ula(1, 0.3, 0.4, 0.5)[0] == cplx(1.0));
  const ComplexMatrix broad = steering_ula(6, kPi / 2, 0.0, 0.5);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(broad[i] - 1.0) < 1e-15);
  const ComplexMatrix end = steering_ula(4, kPi / 2, kPi / 2, 0.5);
  for (std::size_t m = 0; m < 4; ++m)
    CHECK(std::abs(end[m] - std::exp(cplx(0, kPi * static_cast<double>(m)))) < 1e-12);
}

TEST_CASE("upa steering") {
  CHECK(steering_upa(1, 1, 0.7, 0.2, 0.5)[0] == cplx(1.0));
  const ComplexMatrix flat = steering_upa(3, 4, kPi / 2, kPi / 2, 0.5);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(std::abs(flat[i] - 1.0) < 1e-12);

  // Direct index evaluation: entry (nz * Nx + nx) = exp(-j pi (nz cos t + nx sin t cos p)).
  const double t = 0.0, p = 0.9;
  const ComplexMatrix a = steering_upa(2, 2, t, p, 0.5);
  for (std::size_t nz = 0; nz < 2; ++nz)
    for (std::size_t nx = 0; nx < 2; ++nx) {
      const double arg = -kPi * (static_cast<double>(nz) * std::cos(t) +
                                 static_cast<double>(nx) * std::sin(t) * std::cos(p));
      CHECK(std::abs(a[nz * 2 + nx] - std::polar(1.0, arg)) < 1e-12);
    }
  CHECK(std::abs(a[2] - std::exp(cplx(0, -kPi))) < 1e-12);

  const ComplexMatrix b = steering_upa(4, 5, 1.1, 2.3, 0.5);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(std::abs(b[i]) - 1.0) < 1e-14);
}

TEST_CASE("path loss") {
  const double first = -20.0 * std::log10(4.0 * kPi * 3.5e9 / 2.998e8);
  CHECK(path_loss_db(3.5e9, 1.0, 2.2) == first);
  // 20 log10(4 pi 3.5e9 / 2.998e8) = 20 log10(146.70) = 43.329
  CHECK(std::abs(path_loss_db(3.5e9, 1.0, 3.0) + 43.33) <= 0.01);
  CHECK(path_loss_db(3.5e9, 40.0, 2.2) - path_loss_db(3.5e9, 20.0, 2.2) ==
        doctest::Approx(-10.0 * 2.2 * std::log10(2.0)));
  CHECK_THROWS_AS(path_loss_db(3.5e9, 0.5, 2.2), GeometryError);
}

TEST_CASE("rician mix") {
  Rng rng(3);
  const ComplexMatrix los = sample_rayleigh(3, 2, 1.0, rng);
  const ComplexMatrix nlos = sample_rayleigh(3, 2, 1.0, rng);
  const ComplexMatrix hi = rician_mix(los, nlos, 1e12);
  for (std::size_t i = 0; i < los.size(); ++i) CHECK(std::abs(hi[i] - los[i]) <= 1e-5 * std::abs(los[i]));
  CHECK(rician_mix(los, nlos, 0.0) == nlos);
  const ComplexMatrix same = rician_mix(los, los, 1.0);
  for (std::size_t i = 0; i < los.size(); ++i) CHECK(std::abs(same[i] - std::sqrt(2.0) * los[i]) < 1e-12);
  CHECK_THROWS_AS(rician_mix(los, ComplexMatrix(2, 2), 1.0), DimensionError);
}

TEST_CASE("rayleigh statistics") {
  Rng rng(4);
  const ComplexMatrix z = sample_rayleigh(4, 4, 0.0, rng);
  for (const auto& x : z.entries()) CHECK(x == cplx(0.0));

  const ComplexMatrix s = sample_rayleigh(100000, 1, 0.1, rng);
  double power = 0.0, re2 = 0.0, im2 = 0.0;
  for (const auto& x : s.entries()) {
    power += std::norm(x);
    re2 += x.real() * x.real();
    im2 += x.imag() * x.imag();
  }
  const double n = 1e5;
  CHECK(std::abs(power / n - 0.1) < 0.02 * 0.1);
  CHECK(std::abs(re2 / n - 0.05) < 0.03 * 0.05);
  CHECK(std::abs(im2 / n - 0.05) < 0.03 * 0.05);
  CHECK_THROWS(sample_rayleigh(1, 1, -1.0, rng));
}

TEST_CASE("jakes fading") {
  Geometry g;
  g.mt = g.mr = 2;
  g.n1h = g.n1v = g.n2h = g.n2v = 1;
  ChannelParams p;
  Rng rng(5);
  FadingState f(g, p, rng);
  const ComplexMatrix before = f.nlos(FadingState::g);
  jakes_advance(f, 0);
  CHECK(f.nlos(FadingState::g) == before);

  // Long-run power of one entry and its autocorrelation at the coherence lag.
  double power = 0.0;
  std::vector<cplx> trace;
  trace.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    f.advance(1);
    trace.push_back(f.nlos(FadingState::g)[0]);
    power += std::norm(trace.back());
  }
  CHECK(std::abs(power / 1e5 - 1.0) < 0.05);
  auto corr = [&](std::size_t lag) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i + lag < trace.size(); ++i) acc += trace[i + lag] * std::conj(trace[i]);
    return std::abs(acc) / static_cast<double>(trace.size() - lag);
  };
  const double c0 = corr(0);
  const auto coherence = static_cast<std::size_t>(1.0 / (2.0 * p.doppler_hz * p.step_seconds));
  MESSAGE("autocorrelation lag 0: " << c0 << ", lag " << coherence << ": " << corr(coherence) / c0);
  CHECK(corr(coherence) / c0 < 0.9);

  // Zero Doppler freezes the process.
  p.doppler_hz = 0.0;
  Rng rng2(6);
  FadingState still(g, p, rng2);
  const ComplexMatrix s0 = still.nlos(FadingState::h_au);
  still.advance(500);
  for (std::size_t i = 0; i < s0.size(); ++i) CHECK(std::abs(still.nlos(FadingState::h_au)[i] - s0[i]) < 1e-12);
}

TEST_CASE("mobility") {
  Rng rng(7);
  MobilityState still = MobilityState::start({1, 2}, {3, 4}, 0.0, rng);
  for (int i = 0; i < 10; ++i) still = mobility_step(still, rng);
  CHECK(still.users[0].position.x == 1.0);
  CHECK(still.users[1].position.y == 4.0);

  MobilityState m = MobilityState::start({50, 20}, {50, -20}, 1.0, rng);
  double travelled = 0.0;
  bool inside = true;
  for (int i = 0; i < 10000; ++i) {
    const Point before = m.users[0].position;
    m = mobility_step(m, rng);
    travelled += distance(before, m.users[0].position);
    for (const auto& u : m.users) {
      inside = inside && std::abs(u.position.x - u.center.x) <= m.side / 2 + 1e-12 &&
               std::abs(u.position.y - u.center.y) <= m.side / 2 + 1e-12;
    }
  }
  CHECK(inside);
  CHECK(travelled / 1e4 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("realized channels") {
  Geometry g;
  ChannelParams p;
  Rng rng(8);
  FadingState f(g, p, rng);
  const ChannelSet ch = realize_channels(g, p, f, rng);
  CHECK_NOTHROW(ch.check_shapes(g));
  CHECK(ch.f_ai.rows() == 10);
  CHECK(ch.f_ai.cols() == 36);
  CHECK(ch.g_ia.rows() == 36);
  CHECK(ch.g_ia.cols() == 10);
  CHECK(ch.h_aa.rows() == 10);

  p.sigma_aa2 = 0.0;
  const ChannelSet z = realize_channels(g, p, f, rng);
  CHECK(frob_norm(z.h_aa) == 0.0);

  // Pure LOS without path loss: unit-modulus steering entries.
  p.path_loss_enabled = false;
  p.beta_ui_db = 120.0;
  const ChannelSet los = realize_channels(g, p, f, rng);
  CHECK(frob_norm(los.g_di) == doctest::Approx(std::sqrt(36.0)).epsilon(1e-5));

  Geometry bad = g;
  bad.ulue = bad.ris1;
  CHECK_THROWS_AS(realize_channels(bad, p, f, rng), GeometryError);
  Geometry near = g;
  near.ulue = {g.ris1.x + 0.2, g.ris1.y};
  CHECK_NOTHROW(realize_channels(near, p, f, rng));
  CHECK_THROWS_AS(ch.check_shapes([] {
    Geometry o;
    o.mt = o.mr = 3;
    return o;
  }()), DimensionError);
}

TEST_CASE("scenario presets") {
  const auto u = scenario_preset("urban");
  CHECK(u.alpha_au == 3.35);
  CHECK(u.p_a_max_w == 1.0);
  const auto s = scenario_preset("shadowed-urban");
  CHECK(s.alpha_r == 4.5);
  CHECK(s.p_u_max_w == 0.2);
  CHECK_THROWS(scenario_preset("rural"));
  ChannelParams p;
  CHECK(10.0 * std::log10(p.noise_power_w() * 1e3) == doctest::Approx(-174.0 + 80.0));
}
