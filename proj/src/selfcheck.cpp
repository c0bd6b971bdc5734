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

#include "fdris/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "fdris/agent.hpp"
#include "fdris/baselines.hpp"
#include "fdris/env.hpp"
#include "fdris/harness.hpp"

namespace fdris {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Geometry small_geometry(std::size_t m, std::size_t side) {
  Geometry g;
  g.mt = g.mr = m;
  g.n1h = g.n1v = g.n2h = g.n2v = side;
  return g;
}

ChannelSet random_channels(const Geometry& g, Rng& rng) {
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
  c.h_aa = sample_rayleigh(g.mr, g.mt, 1.0, rng);
  return c;
}

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  nn::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -1.0, 1.0);
  return m;
}

CheckResult check_lssic(Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Geometry g = small_geometry(4, 2);
    const ChannelSet ch = random_channels(g, rng);
    const Action a = random_initial_action(g, PowerLimits{}, rng);
    const SiEstimate est = lssic_estimate(ch, a, 0.0, rng);
    worst = std::max(worst, std::abs(est.h_hat - si_gain(ch.h_aa, a)));
  }
  return {"lssic noiseless recovery", worst < 1e-12, "max error " + num(worst)};
}

CheckResult check_zf(Rng& rng) {
  double worst = 0.0;
  double norm_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 2 + static_cast<std::size_t>(i % 9);
    const Geometry g = small_geometry(m, 2);
    const ChannelSet ch = random_channels(g, rng);
    const Action a = random_initial_action(g, PowerLimits{}, rng);
    const CsiView csi = perfect_csi(ch);
    const Action full = perfcsi_agent_action(a, csi);
    const double leak = std::norm(si_gain(ch.h_aa, full)) / frob_norm_sq(ch.h_aa);
    worst = std::max(worst, leak);
    double n2 = 0.0;
    for (const auto& x : full.w_t) n2 += std::norm(x);
    norm_err = std::max(norm_err, std::abs(std::sqrt(n2) - 1.0));
  }
  return {"zero-forcing null space", worst < 1e-18 && norm_err < 1e-9,
          "max leakage " + num(worst) + ", max norm error " + num(norm_err)};
}

CheckResult check_mrc(Rng& rng) {
  bool beaten = false;
  for (int i = 0; i < 20 && !beaten; ++i) {
    const Geometry g = small_geometry(4, 2);
    const ChannelSet ch = random_channels(g, rng);
    Action a = random_initial_action(g, PowerLimits{}, rng);
    a.w_r = mrc_receive(perfect_csi(ch), a.theta_u, a.theta_d);
    const ComplexMatrix u = uplink_channel(ch, a);
    auto gain = [&](const std::vector<cplx>& w) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * u[k];
      return std::norm(s);
    };
    const double best = gain(a.w_r);
    for (int k = 0; k < 200; ++k) {
      const Action r = random_initial_action(g, PowerLimits{}, rng);
      if (gain(r.w_r) > best * (1.0 + 1e-12)) beaten = true;
    }
  }
  return {"mrc optimality", !beaten, beaten ? "random combiner beat MRC" : "never beaten"};
}

CheckResult check_gradients(Rng& rng) {
  FeatureLayout layout;
  layout.n1 = layout.n2 = 2;
  layout.mt = layout.mr = 2;
  ActorSpec spec = ActorSpec::for_layout(layout);
  spec.hidden = 8;
  ActorParams actor = ActorParams::init(spec, rng);
  CriticParams critic = CriticParams::init(layout.state_dim() + layout.action_dim(), 8, rng);
  // Larger output weights so the gradient is well above rounding noise.
  actor.visit([&](const std::string&, nn::Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -0.5, 0.5);
  });
  critic.visit([&](const std::string&, nn::Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -0.5, 0.5);
  });
  Batch batch;
  batch.states = random_matrix(layout.state_dim(), 3, rng);
  batch.actions = random_matrix(layout.action_dim(), 3, rng);
  batch.rewards = random_matrix(1, 3, rng);
  batch.next_states = batch.states;

  ActorParams grad = actor.zeros();
  actor_objective(actor, critic, spec, batch, &grad);
  auto params = nn::param_pointers(actor);
  auto grads = nn::param_pointers(grad);
  double worst = 0.0;
  double largest = 0.0;
  const double h = 1e-6;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (Eigen::Index i = 0; i < params[p]->size(); ++i) {
      double& w = params[p]->data()[i];
      const double saved = w;
      w = saved + h;
      const double up = actor_objective(actor, critic, spec, batch, nullptr);
      w = saved - h;
      const double down = actor_objective(actor, critic, spec, batch, nullptr);
      w = saved;
      const double fd = (up - down) / (2.0 * h);
      const double an = grads[p]->data()[i];
      const double err = std::abs(fd - an) / std::max(1e-6, std::max(std::abs(fd), std::abs(an)));
      worst = std::max(worst, err);
      largest = std::max(largest, std::abs(an));
    }
  }
  return {"actor/critic finite differences", worst < 1e-4, "max relative error " + num(worst) + ", largest gradient " + num(largest)};
}

CheckResult check_signaling() {
  const auto c = signaling_bits(Variant::msf_drl_lssic, 36, 36, 0, 0);
  const auto q = signaling_bits(Variant::msf_q_drl, 36, 36, 2, 0);
  const auto gq = signaling_bits(Variant::gp_msf_q_drl, 36, 36, 2, 9);
  return {"signaling bits", c == 4608 && q == 144 && gq == 36,
          std::to_string(c) + " / " + std::to_string(q) + " / " + std::to_string(gq)};
}

}  // namespace

std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
  Rng rng = make_stream(seed, 0, Stream::evaluation);
  std::vector<CheckResult> out;
  out.push_back(check_lssic(rng));
  out.push_back(check_zf(rng));
  out.push_back(check_mrc(rng));
  out.push_back(check_gradients(rng));
  out.push_back(check_signaling());
  return out;
}

}  // namespace fdris
