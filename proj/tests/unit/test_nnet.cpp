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
#include <functional>

#include "fdris/errors.hpp"
#include "fdris/nnet.hpp"
#include "oracles.hpp"

using namespace fdris;
using namespace fdris::nn;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -scale, scale);
  return m;
}

std::vector<double> col(const Matrix& m, Eigen::Index c = 0) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) v[static_cast<std::size_t>(r)] = m(r, c);
  return v;
}

using Build = std::function<Tape::NodeId(Tape&, Tape::NodeId)>;

// Checks d(sum(seed .* f(x)))/dx and every listed parameter gradient against
// central differences. The build callback must write parameter gradients into
// the sinks listed in `grads` when `record` is true.
double check_node(const Matrix& x0, const Build& build, std::vector<Matrix*> params,
                  std::vector<Matrix*> grads, Rng& rng) {
  Tape tape;
  const auto in = tape.input(x0);
  const auto out = build(tape, in);
  const Matrix seed = random_matrix(tape.value(out).rows(), tape.value(out).cols(), rng);
  for (auto* g : grads) g->setZero();
  tape.backward(out, seed);
  const Matrix dx = tape.grad(in);

  auto loss_at = [&](const Matrix& x) {
    Tape t;
    const auto o = build(t, t.input(x));
    return (t.value(o).array() * seed.array()).sum();
  };
  double worst = 0.0;
  const double h = 1e-6;
  Matrix x = x0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = x.data()[i];
    x.data()[i] = s + h;
    const double up = loss_at(x);
    x.data()[i] = s - h;
    const double down = loss_at(x);
    x.data()[i] = s;
    worst = std::max(worst, oracle::rel_err((up - down) / (2 * h), dx.data()[i]));
  }
  // Snapshot: the FD loss calls rebuild tapes that must not touch the sinks.
  std::vector<Matrix> frozen;
  for (auto* g : grads) frozen.push_back(*g);
  std::vector<const Matrix*> fz;
  for (auto& f : frozen) fz.push_back(&f);
  worst = std::max(worst, oracle::fd_check(params, fz, [&] { return loss_at(x0); }));
  return worst;
}

}  // namespace

TEST_CASE("dense layer forward") {
  Rng rng(1);
  DenseLayer id{Matrix::Identity(3, 3), Matrix::Zero(3, 1)};
  Tape t;
  const Matrix x = random_matrix(3, 2, rng);
  CHECK((t.value(t.dense(id, nullptr, t.input(x))) - x).norm() == 0.0);

  DenseLayer c{Matrix::Zero(2, 3), Matrix::Constant(2, 1, 0.7)};
  const auto y = t.value(t.dense(c, nullptr, t.input(x)));
  CHECK((y.array() == 0.7).all());

  for (int trial = 0; trial < 10; ++trial) {
    const DenseLayer l = init_glorot(5, 4, rng);
    DenseLayer lb = l;
    lb.bias = random_matrix(4, 1, rng);
    const Matrix v = random_matrix(5, 1, rng);
    Tape tt;
    const auto got = col(tt.value(tt.dense(lb, nullptr, tt.input(v))));
    const auto ref = oracle::dense_loop(lb, col(v));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-12);
  }
  DenseLayer bad = init_glorot(4, 2, rng);
  CHECK_THROWS_AS(t.dense(bad, nullptr, t.input(Matrix::Zero(3, 1))), DimensionError);
}

TEST_CASE("activations") {
  Tape t;
  Matrix x(2, 1);
  x << -1.0, 2.0;
  const Matrix r = t.value(t.activation(Activation::relu, t.input(x)));
  CHECK(r(0, 0) == 0.0);
  CHECK(r(1, 0) == 2.0);
  CHECK(t.value(t.activation(Activation::tanh, t.input(Matrix::Zero(1, 1))))(0, 0) == 0.0);
  const Matrix s = t.value(t.activation(Activation::softmax, t.input(Matrix::Zero(2, 1))));
  CHECK(s(0, 0) == doctest::Approx(0.5));
  CHECK(s(1, 0) == doctest::Approx(0.5));

  Matrix big(3, 1);
  big << 1000.0, 999.0, -1000.0;
  const Matrix sb = t.value(t.activation(Activation::softmax, t.input(big)));
  CHECK(sb.allFinite());
  CHECK(sb.sum() == doctest::Approx(1.0));

  Matrix blocks(4, 1);
  blocks << 0.0, 0.0, 1.0, 1.0;
  const Matrix bs = t.value(t.block_softmax(t.input(blocks), 2));
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(bs(i, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(t.block_softmax(t.input(Matrix::Zero(3, 1)), 2), DimensionError);
}

TEST_CASE("layer norm forward") {
  LayerNormParams p = init_layer_norm(4);
  Tape t;
  const Matrix c = t.value(t.layer_norm(p, nullptr, t.input(Matrix::Constant(4, 1, 3.0))));
  CHECK(c.norm() == 0.0);

  LayerNormParams p2 = init_layer_norm(2);
  Matrix x(2, 1);
  x << -1.0, 1.0;
  const Matrix y = t.value(t.layer_norm(p2, nullptr, t.input(x)));
  CHECK(y(0, 0) == doctest::Approx(-1.0 / std::sqrt(1.0 + p2.epsilon)).epsilon(1e-14));
  CHECK(y(1, 0) == doctest::Approx(1.0 / std::sqrt(1.0 + p2.epsilon)).epsilon(1e-14));

  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    LayerNormParams q = init_layer_norm(6);
    q.gain = random_matrix(6, 1, rng);
    q.offset = random_matrix(6, 1, rng);
    const Matrix v = random_matrix(6, 1, rng, 3.0);
    Tape tt;
    const auto got = col(tt.value(tt.layer_norm(q, nullptr, tt.input(v))));
    const auto ref = oracle::layer_norm_direct(q, col(v));
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-12);
  }
}

TEST_CASE("backward on trivial graphs") {
  // f(x) = x^2 written as a 1x1 dense layer with weight x applied to x.
  Tape t;
  Matrix x = Matrix::Constant(1, 1, 3.0);
  DenseLayer sq{x, Matrix::Zero(1, 1)};
  DenseLayer g = zeros_like(sq);
  const auto in = t.input(x);
  const auto out = t.dense(sq, &g, in);
  t.backward(out, 1.0);
  CHECK(t.grad(in)(0, 0) + g.weight(0, 0) == doctest::Approx(6.0));

  // f(W) = sum(W x) -> dW = outer(1, x)
  Rng rng(3);
  DenseLayer l = init_glorot(3, 2, rng);
  DenseLayer lg = zeros_like(l);
  const Matrix v = random_matrix(3, 1, rng);
  Tape t2;
  const auto o = t2.dense(l, &lg, t2.input(v));
  t2.backward(o, Matrix::Ones(2, 1));
  for (Eigen::Index r = 0; r < 2; ++r)
    for (Eigen::Index c = 0; c < 3; ++c) CHECK(lg.weight(r, c) == doctest::Approx(v(c, 0)));

  CHECK_THROWS_AS(t2.backward(o, 1.0), TapeError);
  CHECK_THROWS_AS(t2.value(999), TapeError);
}

TEST_CASE("every layer type matches finite differences") {
  Rng rng(4);
  for (int seed = 0; seed < 5; ++seed) {
    const Matrix x = random_matrix(6, 3, rng);

    DenseLayer d = init_glorot(6, 4, rng);
    d.bias = random_matrix(4, 1, rng);
    DenseLayer dg = zeros_like(d);
    CHECK(check_node(x, [&](Tape& t, Tape::NodeId n) { return t.dense(d, &dg, n); },
                     {&d.weight, &d.bias}, {&dg.weight, &dg.bias}, rng) < 1e-4);

    LayerNormParams ln = init_layer_norm(6);
    ln.gain = random_matrix(6, 1, rng);
    ln.offset = random_matrix(6, 1, rng);
    LayerNormParams lng = zeros_like(ln);
    CHECK(check_node(x, [&](Tape& t, Tape::NodeId n) { return t.layer_norm(ln, &lng, n); },
                     {&ln.gain, &ln.offset}, {&lng.gain, &lng.offset}, rng) < 1e-4);

    CHECK(check_node(x, [](Tape& t, Tape::NodeId n) { return t.activation(Activation::tanh, n); },
                     {}, {}, rng) < 1e-4);
    // Shift away from the relu kink so central differences are valid.
    Matrix xr = x;
    for (Eigen::Index i = 0; i < xr.size(); ++i)
      if (std::abs(xr.data()[i]) < 1e-3) xr.data()[i] = 0.5;
    CHECK(check_node(xr, [](Tape& t, Tape::NodeId n) { return t.activation(Activation::relu, n); },
                     {}, {}, rng) < 1e-4);
    CHECK(check_node(x, [](Tape& t, Tape::NodeId n) { return t.block_softmax(n, 3); }, {}, {},
                     rng) < 1e-4);
    CHECK(check_node(x, [](Tape& t, Tape::NodeId n) { return t.activation(Activation::softmax, n); },
                     {}, {}, rng) < 1e-4);
    CHECK(check_node(x, [](Tape& t, Tape::NodeId n) { return t.unit_normalize(n); }, {}, {},
                     rng) < 1e-4);
    CHECK(check_node(x, [](Tape& t, Tape::NodeId n) { return t.slice_rows(n, 2, 3); }, {}, {},
                     rng) < 1e-4);
    CHECK(check_node(x,
                     [](Tape& t, Tape::NodeId n) {
                       const std::array<Tape::NodeId, 2> parts{t.slice_rows(n, 3, 3),
                                                               t.slice_rows(n, 0, 2)};
                       return t.concat_rows(parts);
                     },
                     {}, {}, rng) < 1e-4);
    CHECK(check_node(x, [](Tape& t, Tape::NodeId n) { return t.gather_rows(n, {0, 0, 5, 2, 5}); },
                     {}, {}, rng) < 1e-4);
  }
}

TEST_CASE("two-layer network gradients") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    DenseLayer a = init_glorot(4, 7, rng), b = init_glorot(7, 1, rng);
    a.bias = random_matrix(7, 1, rng);
    DenseLayer ag = zeros_like(a), bg = zeros_like(b);
    const Matrix x = random_matrix(4, 2, rng);
    auto build = [&](Tape& t, Tape::NodeId n) {
      return t.dense(b, &bg, t.activation(Activation::tanh, t.dense(a, &ag, n)));
    };
    CHECK(check_node(x, build, {&a.weight, &a.bias, &b.weight, &b.bias},
                     {&ag.weight, &ag.bias, &bg.weight, &bg.bias}, rng) < 1e-4);
  }
}

TEST_CASE("grid select is argmax forward and expectation backward") {
  Tape t;
  Matrix p(4, 1);
  p << 0.1, 0.6, 0.2, 0.1;
  const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5};
  const auto in = t.input(p);
  const auto out = t.grid_select(in, grid);
  CHECK(t.value(out)(0, 0) == -0.5);
  t.backward(out, 2.0);
  for (Eigen::Index k = 0; k < 4; ++k) CHECK(t.grad(in)(k, 0) == 2.0 * grid[static_cast<std::size_t>(k)]);

  Tape u;
  const auto tie = u.grid_select(u.input(Matrix::Constant(4, 1, 0.25)), grid);
  CHECK(u.value(tie)(0, 0) == -1.0);
}

TEST_CASE("unit normalize maps zero columns to the first basis vector") {
  Tape t;
  const auto in = t.input(Matrix::Zero(3, 1));
  const auto out = t.unit_normalize(in);
  CHECK(t.value(out)(0, 0) == 1.0);
  t.backward(out, Matrix::Ones(3, 1));
  CHECK(t.grad(in).norm() == 0.0);
}

TEST_CASE("replay recomputes with updated parameters") {
  Rng rng(6);
  DenseLayer l = init_glorot(2, 2, rng);
  Tape t;
  const auto out = t.dense(l, nullptr, t.input(Matrix::Ones(2, 1)));
  l.bias.setConstant(5.0);
  t.replay();
  const Matrix expect = l.weight * Matrix::Ones(2, 1) + l.bias;
  CHECK((t.value(out) - expect).norm() < 1e-15);
}

TEST_CASE("initializers") {
  Rng rng(7);
  const DenseLayer s = init_small_uniform(50, 40, 3e-3, rng);
  CHECK(s.weight.cwiseAbs().maxCoeff() <= 3e-3);
  CHECK(s.bias.norm() == 0.0);
  const DenseLayer one = init_glorot(1, 1, rng);
  CHECK(std::abs(one.weight(0, 0)) <= std::sqrt(3.0));
  CHECK_THROWS(init_small_uniform(2, 2, 0.0, rng));

  // 1e5 glorot draws: mean within 3 standard errors of zero.
  const DenseLayer big = init_glorot(500, 200, rng);
  const double g = std::sqrt(6.0 / 700.0);
  const double sd = g / std::sqrt(3.0);
  const double n = static_cast<double>(big.weight.size());
  CHECK(std::abs(big.weight.mean()) < 3.0 * sd / std::sqrt(n));
  CHECK(big.weight.cwiseAbs().maxCoeff() <= g);
}

TEST_CASE("adam") {
  Matrix w = Matrix::Constant(2, 2, 1.5);
  Matrix g = Matrix::Zero(2, 2);
  Adam opt(AdamConfig{0.01});
  std::vector<Matrix*> ps{&w};
  std::vector<const Matrix*> gs{&g};
  opt.step(ps, gs);
  CHECK((w.array() == 1.5).all());

  // First step with a constant gradient moves each entry by the learning rate.
  Matrix w2 = Matrix::Zero(1, 3);
  Matrix g2(1, 3);
  g2 << 0.5, -2.0, 100.0;
  Adam opt2(AdamConfig{0.01});
  std::vector<Matrix*> p2{&w2};
  std::vector<const Matrix*> q2{&g2};
  opt2.step(p2, q2);
  CHECK(w2(0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(w2(0, 1) == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(w2(0, 2) == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(opt2.steps() == 1);

  // Quadratic loss (w - 3)^2 decreases over two identical-rule steps.
  Matrix q = Matrix::Zero(1, 1);
  Matrix qg(1, 1);
  Adam opt3(AdamConfig{0.1});
  std::vector<Matrix*> p3{&q};
  std::vector<const Matrix*> g3{&qg};
  double last = (q(0, 0) - 3) * (q(0, 0) - 3);
  for (int i = 0; i < 2; ++i) {
    qg(0, 0) = 2 * (q(0, 0) - 3);
    opt3.step(p3, g3);
    const double now = (q(0, 0) - 3) * (q(0, 0) - 3);
    CHECK(now < last);
    last = now;
  }
  Matrix wrong = Matrix::Zero(3, 1);
  std::vector<const Matrix*> bad{&wrong};
  CHECK_THROWS_AS(opt3.step(p3, bad), DimensionError);
}
