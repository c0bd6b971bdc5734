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

#include "fdris/env.hpp"
#include "fdris/errors.hpp"
#include "fdris/features.hpp"
#include "oracles.hpp"

using namespace fdris;

namespace {

Geometry tiny(std::size_t m, std::size_t side) {
  Geometry g;
  g.mt = g.mr = m;
  g.n1h = g.n1v = g.n2h = g.n2v = side;
  return g;
}

ChannelSet random_set(const Geometry& g, Rng& rng, double aa = 1.0) {
  ChannelSet c;
  c.f_iu = sample_rayleigh(g.n1(), 1, 1.0, rng);
  c.f_ai = sample_rayleigh(g.mr, g.n1(), 1.0, rng);
  c.h_au = sample_rayleigh(g.mr, 1, 1.0, rng);
  c.g_ia = sample_rayleigh(g.n2(), g.mt, 1.0, rng);
  c.g_iu = sample_rayleigh(g.n2(), 1, 1.0, rng);
  c.g_di = sample_rayleigh(1, g.n2(), 1.0, rng);
  c.h_da = sample_rayleigh(1, g.mt, 1.0, rng);
  c.f_di = sample_rayleigh(1, g.n1(), 1.0, rng);
  c.g = sample_rayleigh(1, 1, 1.0, rng);
  c.h_aa = sample_rayleigh(g.mr, g.mt, aa, rng);
  return c;
}

ChannelSet ones(const Geometry& g) {
  auto one = [](std::size_t r, std::size_t c) { return ComplexMatrix(r, c, std::vector<cplx>(r * c, 1.0)); };
  ChannelSet c;
  c.f_iu = one(g.n1(), 1);
  c.f_ai = one(g.mr, g.n1());
  c.h_au = one(g.mr, 1);
  c.g_ia = one(g.n2(), g.mt);
  c.g_iu = one(g.n2(), 1);
  c.g_di = one(1, g.n2());
  c.h_da = one(1, g.mt);
  c.f_di = one(1, g.n1());
  c.g = one(1, 1);
  c.h_aa = one(g.mr, g.mt);
  return c;
}

EnvConfig small_env() {
  EnvConfig e;
  e.geometry = tiny(4, 4);
  return e;
}

}  // namespace

TEST_CASE("reset") {
  Environment env(small_env(), 3, 0);
  CHECK_THROWS_AS(env.step(Action{}), LifecycleError);
  const State s = env.reset();
  CHECK(env.started());
  CHECK(s.flatten().size() == state_length(env.config().geometry, false));
  const auto& lim = env.config().limits;
  CHECK(s.prev.p_a >= lim.p_a_max / 3);
  CHECK(s.prev.p_a <= 2 * lim.p_a_max / 3);
  CHECK(s.prev.p_u >= lim.p_u_max / 3);
  CHECK(s.prev.p_u <= 2 * lim.p_u_max / 3);
  CHECK_NOTHROW(s.prev.validate(env.config().geometry, lim));

  Environment again(small_env(), 3, 0);
  CHECK(again.reset().flatten() == s.flatten());
  Environment other(small_env(), 3, 1);
  CHECK(other.reset().flatten() != s.flatten());

  EnvConfig pos = small_env();
  pos.positions_in_state = true;
  Environment penv(pos, 3, 0);
  CHECK(penv.reset().flatten().size() == state_length(pos.geometry, true));
}

TEST_CASE("lssic estimate") {
  Rng rng(10);
  const Geometry g = tiny(3, 2);
  for (int i = 0; i < 50; ++i) {
    const ChannelSet ch = random_set(g, rng);
    const Action a = random_initial_action(g, PowerLimits{}, rng);
    CHECK(std::abs(lssic_estimate(ch, a, 0.0, rng).h_hat - si_gain(ch.h_aa, a)) < 1e-12);
  }
  ChannelSet zero = random_set(g, rng);
  zero.h_aa = ComplexMatrix(3, 3);
  const Action a = random_initial_action(g, PowerLimits{}, rng);
  CHECK(lssic_estimate(zero, a, 0.0, rng).h_hat == cplx(0.0));

  // Unbiased within 3 standard errors over 1e4 pilots.
  const ChannelSet ch = random_set(g, rng);
  const double s2 = 0.3;
  cplx sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += lssic_estimate(ch, a, s2, rng).h_hat;
  const cplx mean = sum / static_cast<double>(n);
  const double se = std::sqrt(s2 / a.p_a / n);  // |w_R| = 1
  CHECK(std::abs(mean - si_gain(ch.h_aa, a)) < 3.0 * se);

  Action off = a;
  off.p_a = 0.0;
  CHECK_THROWS_AS(lssic_estimate(ch, off, s2, rng), PowerError);
}

TEST_CASE("hsic estimate") {
  Rng rng(11);
  const Geometry g = tiny(4, 2);
  const ChannelSet ch = random_set(g, rng);
  const Action a = random_initial_action(g, PowerLimits{}, rng);
  CHECK(hsic_estimate(ch.h_aa, a).h_hat == si_gain(ch.h_aa, a));
  double worst = 0.0, mean = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ComplexMatrix noisy = ch.h_aa + sample_rayleigh(4, 4, 1e-12, rng);
    const double e = std::norm(hsic_estimate(noisy, a).h_hat - si_gain(ch.h_aa, a));
    worst = std::max(worst, e);
    mean += e / 1000;
  }
  CHECK(mean <= 1e-12);
  CHECK(worst <= 1e-11);
  CHECK_THROWS_AS(hsic_estimate(ComplexMatrix(3, 4), a), DimensionError);
}

TEST_CASE("sinr scalar example") {
  const Geometry g = tiny(1, 1);
  const ChannelSet ch = ones(g);
  Action a;
  a.theta_u = {0.0};
  a.theta_d = {0.0};
  a.w_t = {1.0};
  a.w_r = {1.0};
  a.p_a = 0.0;
  a.p_u = 0.05;
  const double s2 = 1e-3;
  const SinrPair s = compute_sinrs(ch, a, hsic_estimate(ch.h_aa, a), s2, s2);
  CHECK(s.gamma_bs == doctest::Approx(9.0 * a.p_u / s2).epsilon(1e-14));

  a.p_u = 0.0;
  a.p_a = 0.5;
  const SinrPair q = compute_sinrs(ch, a, SiEstimate{}, s2, s2);
  CHECK(q.gamma_bs == 0.0);
  CHECK(q.gamma_dl == doctest::Approx(a.p_a * 9.0 / s2).epsilon(1e-14));
}

TEST_CASE("sinr matches the direct evaluator") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Geometry g = tiny(1 + static_cast<std::size_t>(i % 5), 1 + static_cast<std::size_t>(i % 3));
    const ChannelSet ch = random_set(g, rng);
    const Action a = random_initial_action(g, PowerLimits{}, rng);
    const cplx h_hat = complex_gaussian(rng, 0.5);
    const SinrPair s = compute_sinrs(ch, a, SiEstimate{h_hat, SiMethod::lssic}, 0.01, 0.02);
    const auto ref = oracle::direct_sinrs(ch, a, h_hat, 0.01, 0.02);
    CHECK(std::abs(s.gamma_bs - ref.bs) <= 1e-10 * std::max(1.0, ref.bs));
    CHECK(std::abs(s.gamma_dl - ref.dl) <= 1e-10 * std::max(1.0, ref.dl));
  }
}

TEST_CASE("sinr invariances") {
  Rng rng(13);
  const Geometry g = tiny(3, 2);
  for (int i = 0; i < 50; ++i) {
    const ChannelSet ch = random_set(g, rng);
    Action a = random_initial_action(g, PowerLimits{}, rng);
    const SinrPair base = compute_sinrs(ch, a, SiEstimate{}, 0.1, 0.1);
    const cplx c = complex_gaussian(rng, 4.0);
    Action scaled = a;
    for (auto& w : scaled.w_r) w *= c;
    const SinrPair s = compute_sinrs(ch, scaled, SiEstimate{}, 0.1, 0.1);
    CHECK(s.gamma_bs == doctest::Approx(base.gamma_bs).epsilon(1e-10));

    // Exact cancellation makes gamma_BS independent of the SI channel strength.
    ChannelSet strong = ch;
    strong.h_aa *= 1e3;
    const double e1 = compute_sinrs(ch, a, hsic_estimate(ch.h_aa, a), 0.1, 0.1).gamma_bs;
    const double e2 = compute_sinrs(strong, a, hsic_estimate(strong.h_aa, a), 0.1, 0.1).gamma_bs;
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-9));
  }
}

TEST_CASE("reward") {
  CHECK(rate_bits(1.0) == 1.0);
  CHECK(rate_bits(0.0) == 0.0);
  EnvConfig e = small_env();
  e.delta = 1.0;
  Environment env(e, 1, 0);
  env.reset();
  Rng rng(1);
  const auto out = env.step(random_initial_action(e.geometry, e.limits, rng));
  CHECK(out.reward == out.r_bs);
  CHECK(out.r_bs >= 0.0);
  CHECK(out.r_dl >= 0.0);
  CHECK(e.delta != EnvConfig{}.delta);
  CHECK(EnvConfig{}.delta == 0.5);
  // delta = 0.5 with unit SINRs is exactly one bit.
  CHECK(0.5 * rate_bits(1.0) + 0.5 * rate_bits(1.0) == 1.0);
}

TEST_CASE("action validation") {
  const Geometry g = tiny(2, 1);
  Rng rng(14);
  const PowerLimits lim;
  Action a = random_initial_action(g, lim, rng);
  CHECK_NOTHROW(a.validate(g, lim));
  Action b = a;
  b.theta_u[0] = 2 * std::numbers::pi;
  CHECK_THROWS_AS(b.validate(g, lim), ActionError);
  b = a;
  b.w_t[0] *= 1.01;
  CHECK_THROWS_AS(b.validate(g, lim), ActionError);
  b = a;
  b.w_r.assign(2, 0.0);
  CHECK_THROWS_AS(b.validate(g, lim), ActionError);
  b = a;
  b.p_u = lim.p_u_max * 1.001;
  CHECK_THROWS_AS(b.validate(g, lim), ActionError);
  b = a;
  b.theta_d.push_back(0.0);
  CHECK_THROWS_AS(b.validate(g, lim), ActionError);
}

TEST_CASE("channel evolution and pinning") {
  Environment env(small_env(), 5, 0);
  env.reset();
  Rng rng(2);
  const ChannelSet before = env.channels();
  env.step(random_initial_action(small_env().geometry, PowerLimits{}, rng));
  CHECK(!(env.channels().h_au == before.h_au));

  env.pin_channels(before);
  env.step(random_initial_action(small_env().geometry, PowerLimits{}, rng));
  CHECK(env.channels().h_au == before.h_au);
  CHECK(env.steps_taken() == 3);

  ChannelSet wrong = before;
  wrong.g = ComplexMatrix(2, 1);
  CHECK_THROWS_AS(env.pin_channels(wrong), DimensionError);
}

TEST_CASE("mobility moves users between steps") {
  EnvConfig e = small_env();
  e.mobility = true;
  e.positions_in_state = true;
  Environment env(e, 9, 0);
  const State s0 = env.reset();
  Rng rng(3);
  const auto out = env.step(random_initial_action(e.geometry, e.limits, rng));
  REQUIRE(out.next_state.positions);
  CHECK((*out.next_state.positions)[0] != (*s0.positions)[0]);
}

TEST_CASE("config guards") {
  EnvConfig e = small_env();
  e.geometry.mr = 3;
  CHECK_THROWS_AS(Environment(e, 1, 0), GeometryError);
  e = small_env();
  e.delta = 1.5;
  CHECK_THROWS(Environment(e, 1, 0));
}

TEST_CASE("feature encodings") {
  const Geometry g = tiny(2, 2);
  EnvConfig e;
  e.geometry = g;
  const FeatureLayout lay = FeatureLayout::from(e);
  Rng rng(4);
  Action a = random_initial_action(g, e.limits, rng);
  a.theta_u[0] = 0.0;
  a.p_a = e.limits.p_a_max;
  a.p_u = 0.0;
  const nn::Vector f = encode_action(lay, a);
  CHECK(static_cast<std::size_t>(f.size()) == lay.action_dim());
  CHECK(f(0) == -1.0);
  CHECK(f(static_cast<Eigen::Index>(lay.w_t_offset())) == a.w_t[0].real());
  CHECK(f(static_cast<Eigen::Index>(lay.w_t_offset() + g.mt)) == a.w_t[0].imag());
  CHECK(f(static_cast<Eigen::Index>(lay.power_offset())) == 1.0);
  CHECK(f(static_cast<Eigen::Index>(lay.power_offset() + 1)) == -1.0);

  State s;
  s.gamma_bs = 1e9;
  s.gamma_dl = 0.0;
  s.prev = a;
  const nn::Vector sf = encode_state(lay, s);
  CHECK(static_cast<std::size_t>(sf.size()) == lay.state_dim());
  CHECK(sf(0) == doctest::Approx(std::log10(1.0 + 1e6)));
  CHECK(sf(1) == 0.0);
  CHECK((sf.segment(2, f.size()) - f).norm() == 0.0);
}
