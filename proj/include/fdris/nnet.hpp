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

// Small dense networks with hand-written reverse-mode gradients.
//
// Values flowing through a Tape are Eigen matrices laid out features x batch:
// every column is one sample. Parameter gradients are accumulated (+=) into
// caller-owned sinks that mirror the parameter structs, so the caller zeroes
// them before a backward pass.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fdris/rng.hpp"

namespace fdris::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DenseLayer {
  Matrix weight;  // d_out x d_in
  Matrix bias;    // d_out x 1

  std::size_t in_dim() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weight.rows()); }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".weight", weight);
    f(prefix + ".bias", bias);
  }
};

struct LayerNormParams {
  Matrix gain;    // d x 1
  Matrix offset;  // d x 1
  double epsilon = 1e-5;

  std::size_t dim() const { return static_cast<std::size_t>(gain.rows()); }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".gain", gain);
    f(prefix + ".offset", offset);
  }
};

/// Glorot uniform weights U(-g, g), g = sqrt(6 / (d_in + d_out)); zero bias.
DenseLayer init_glorot(std::size_t d_in, std::size_t d_out, Rng& rng);
/// Uniform weights U(-bound, bound); zero bias. bound must be positive.
DenseLayer init_small_uniform(std::size_t d_in, std::size_t d_out, double bound, Rng& rng);
LayerNormParams init_layer_norm(std::size_t dim, double epsilon = 1e-5);

DenseLayer zeros_like(const DenseLayer& layer);
LayerNormParams zeros_like(const LayerNormParams& params);

enum class Activation { relu, tanh, softmax };

class Tape {
 public:
  using NodeId = std::size_t;

  NodeId input(Matrix value);

  /// W x + b. `grad` may be null when parameter gradients are not needed.
  NodeId dense(const DenseLayer& layer, DenseLayer* grad, NodeId x);
  /// Per-column normalization (x - mean) / sqrt(var + eps) * gain + offset.
  /// Gradients flow through the mean and variance.
  NodeId layer_norm(const LayerNormParams& params, LayerNormParams* grad, NodeId x);
  /// Element-wise relu/tanh; softmax over the whole column.
  NodeId activation(Activation kind, NodeId x);
  /// Softmax over consecutive blocks of `block` rows in every column.
  NodeId block_softmax(NodeId x, std::size_t block);

  NodeId slice_rows(NodeId x, std::size_t start, std::size_t count);
  NodeId concat_rows(std::span<const NodeId> parts);
  /// out[i] = x[index[i]]; gradients scatter-add back.
  NodeId gather_rows(NodeId x, std::vector<std::size_t> index);
  /// Scales every column to unit L2 norm. An all-zero column maps to the
  /// first basis vector with zero gradient.
  NodeId unit_normalize(NodeId x);
  /// Straight-through grid selection. `probs` holds consecutive blocks of
  /// grid.size() probabilities. The forward value of block i is grid[argmax]
  /// (ties to the lowest index); the backward pass treats the output as the
  /// expectation sum_k p_k grid[k].
  NodeId grid_select(NodeId probs, std::vector<double> grid);

  const Matrix& value(NodeId id) const;
  const Matrix& grad(NodeId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse pass seeded with d(loss)/d(output) = seed.
  void backward(NodeId output, const Matrix& seed);
  /// Reverse pass for a 1x1 output.
  void backward(NodeId output, double loss_grad);

  /// Recomputes every node from the recorded inputs and parameters.
  void replay();

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<Matrix(const Tape&)> forward;  // empty for inputs
    std::function<void(Tape&, const Matrix&)> pullback;
  };

  NodeId push(std::function<Matrix(const Tape&)> forward,
              std::function<void(Tape&, const Matrix&)> pullback);
  void accumulate(NodeId id, const Matrix& g);
  void check(NodeId id) const;

  std::vector<Node> nodes_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam optimizer state. Moment buffers are created on the first step and
/// mirror the parameter list passed in.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamConfig config) : config_(config) {}

  void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);

  const AdamConfig& config() const noexcept { return config_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::vector<Matrix>& first_moments() noexcept { return m_; }
  std::vector<Matrix>& second_moments() noexcept { return v_; }
  void set_steps(std::uint64_t s) noexcept { steps_ = s; }

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

/// Named parameter references collected from a visitor.
struct ParamRef {
  std::string name;
  Matrix* value;
};

template <class Net>
std::vector<ParamRef> collect_params(Net& net) {
  std::vector<ParamRef> out;
  net.visit([&](const std::string& name, Matrix& m) { out.push_back({name, &m}); });
  return out;
}

template <class Net>
std::vector<Matrix*> param_pointers(Net& net) {
  std::vector<Matrix*> out;
  net.visit([&](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

template <class Net>
void zero_grads(Net& grads) {
  grads.visit([](const std::string&, Matrix& m) { m.setZero(); });
}

/// target <- lambda * active + (1 - lambda) * target, tensor by tensor.
template <class Net>
void soft_update_params(Net& active, Net& target, double lambda) {
  auto a = param_pointers(active);
  auto t = param_pointers(target);
  for (std::size_t i = 0; i < a.size(); ++i) *t[i] = lambda * *a[i] + (1.0 - lambda) * *t[i];
}

}  // namespace fdris::nn
