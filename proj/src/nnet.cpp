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

#include "fdris/nnet.hpp"

#include <cmath>
#include <string>

#include "fdris/errors.hpp"

namespace fdris::nn {

DenseLayer init_glorot(std::size_t d_in, std::size_t d_out, Rng& rng) {
  const double g = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
  DenseLayer layer{Matrix(d_out, d_in), Matrix::Zero(d_out, 1)};
  std::uniform_real_distribution<double> u(-g, g);
  for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = u(rng);
  return layer;
}

DenseLayer init_small_uniform(std::size_t d_in, std::size_t d_out, double bound, Rng& rng) {
  if (!(bound > 0.0)) throw std::invalid_argument("init_small_uniform: bound must be positive");
  DenseLayer layer{Matrix(d_out, d_in), Matrix::Zero(d_out, 1)};
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = u(rng);
  return layer;
}

LayerNormParams init_layer_norm(std::size_t dim, double epsilon) {
  return {Matrix::Ones(dim, 1), Matrix::Zero(dim, 1), epsilon};
}

DenseLayer zeros_like(const DenseLayer& layer) {
  return {Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
          Matrix::Zero(layer.bias.rows(), 1)};
}

LayerNormParams zeros_like(const LayerNormParams& params) {
  return {Matrix::Zero(params.gain.rows(), 1), Matrix::Zero(params.offset.rows(), 1),
          params.epsilon};
}

// ---------------------------------------------------------------------------
// Tape

Tape::NodeId Tape::push(std::function<Matrix(const Tape&)> forward,
                        std::function<void(Tape&, const Matrix&)> pullback) {
  Node node;
  node.value = forward(*this);
  node.forward = std::move(forward);
  node.pullback = std::move(pullback);
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

void Tape::check(NodeId id) const {
  if (id >= nodes_.size()) {
    throw TapeError("tape: node " + std::to_string(id) + " not recorded (tape holds " +
                    std::to_string(nodes_.size()) + ")");
  }
}

void Tape::accumulate(NodeId id, const Matrix& g) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

Tape::NodeId Tape::input(Matrix value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

Tape::NodeId Tape::dense(const DenseLayer& layer, DenseLayer* grad, NodeId x) {
  check(x);
  if (static_cast<std::size_t>(value(x).rows()) != layer.in_dim()) {
    throw DimensionError("dense: input has " + std::to_string(value(x).rows()) +
                         " rows, layer expects " + std::to_string(layer.in_dim()));
  }
  const DenseLayer* w = &layer;
  return push(
      [w, x](const Tape& t) -> Matrix {
        Matrix y = w->weight * t.value(x);
        y.colwise() += w->bias.col(0);
        return y;
      },
      [w, grad, x](Tape& t, const Matrix& g) {
        if (grad != nullptr) {
          grad->weight.noalias() += g * t.value(x).transpose();
          grad->bias.col(0) += g.rowwise().sum();
        }
        t.accumulate(x, w->weight.transpose() * g);
      });
}

Tape::NodeId Tape::layer_norm(const LayerNormParams& params, LayerNormParams* grad, NodeId x) {
  check(x);
  if (static_cast<std::size_t>(value(x).rows()) != params.dim()) {
    throw DimensionError("layer_norm: dimension mismatch");
  }
  const LayerNormParams* p = &params;
  auto normalize = [p](const Matrix& in, Matrix& xhat, Eigen::RowVectorXd& inv_std) {
    const double d = static_cast<double>(in.rows());
    const Eigen::RowVectorXd mean = in.colwise().sum() / d;
    Matrix centered = in.rowwise() - mean;
    const Eigen::RowVectorXd var = centered.array().square().colwise().sum() / d;
    inv_std = (var.array() + p->epsilon).rsqrt().matrix();
    xhat = centered.array().rowwise() * inv_std.array();
  };
  return push(
      [p, x, normalize](const Tape& t) -> Matrix {
        Matrix xhat;
        Eigen::RowVectorXd inv_std;
        normalize(t.value(x), xhat, inv_std);
        Matrix y = xhat.array().colwise() * p->gain.col(0).array();
        y.colwise() += p->offset.col(0);
        return y;
      },
      [p, grad, x, normalize](Tape& t, const Matrix& g) {
        Matrix xhat;
        Eigen::RowVectorXd inv_std;
        normalize(t.value(x), xhat, inv_std);
        if (grad != nullptr) {
          grad->gain.col(0) += (g.array() * xhat.array()).rowwise().sum().matrix();
          grad->offset.col(0) += g.rowwise().sum();
        }
        const double d = static_cast<double>(xhat.rows());
        const Matrix dxhat = g.array().colwise() * p->gain.col(0).array();
        const Eigen::RowVectorXd mean_dxhat = dxhat.colwise().sum() / d;
        const Eigen::RowVectorXd mean_dxhat_xhat =
            (dxhat.array() * xhat.array()).colwise().sum() / d;
        Matrix dx = dxhat.rowwise() - mean_dxhat;
        dx -= (xhat.array().rowwise() * mean_dxhat_xhat.array()).matrix();
        dx = dx.array().rowwise() * inv_std.array();
        t.accumulate(x, dx);
      });
}

namespace {

Matrix softmax_blocks(const Matrix& in, std::size_t block) {
  Matrix out(in.rows(), in.cols());
  const auto b = static_cast<Eigen::Index>(block);
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    for (Eigen::Index r0 = 0; r0 < in.rows(); r0 += b) {
      const auto seg = in.col(c).segment(r0, b);
      const double mx = seg.maxCoeff();
      Vector e = (seg.array() - mx).exp();
      out.col(c).segment(r0, b) = e / e.sum();
    }
  }
  return out;
}

Matrix softmax_blocks_pullback(const Matrix& p, const Matrix& g, std::size_t block) {
  Matrix dx(p.rows(), p.cols());
  const auto b = static_cast<Eigen::Index>(block);
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    for (Eigen::Index r0 = 0; r0 < p.rows(); r0 += b) {
      const auto ps = p.col(c).segment(r0, b);
      const auto gs = g.col(c).segment(r0, b);
      const double dot = ps.dot(gs);
      dx.col(c).segment(r0, b) = ps.array() * (gs.array() - dot);
    }
  }
  return dx;
}

}  // namespace

Tape::NodeId Tape::activation(Activation kind, NodeId x) {
  check(x);
  switch (kind) {
    case Activation::relu:
      return push([x](const Tape& t) -> Matrix { return t.value(x).cwiseMax(0.0); },
                  [x](Tape& t, const Matrix& g) {
                    t.accumulate(x, (t.value(x).array() > 0.0).select(g, 0.0));
                  });
    case Activation::tanh: {
      const NodeId self = nodes_.size();
      return push([x](const Tape& t) -> Matrix { return t.value(x).array().tanh().matrix(); },
                  [x, self](Tape& t, const Matrix& g) {
                    const Matrix& y = t.value(self);
                    t.accumulate(x, (g.array() * (1.0 - y.array().square())).matrix());
                  });
    }
    case Activation::softmax:
      return block_softmax(x, static_cast<std::size_t>(value(x).rows()));
  }
  throw std::invalid_argument("activation: unknown kind");
}

Tape::NodeId Tape::block_softmax(NodeId x, std::size_t block) {
  check(x);
  if (block == 0 || value(x).rows() % static_cast<Eigen::Index>(block) != 0) {
    throw DimensionError("block_softmax: rows not a multiple of the block size");
  }
  const NodeId self = nodes_.size();
  return push([x, block](const Tape& t) -> Matrix { return softmax_blocks(t.value(x), block); },
              [x, self, block](Tape& t, const Matrix& g) {
                t.accumulate(x, softmax_blocks_pullback(t.value(self), g, block));
              });
}

Tape::NodeId Tape::slice_rows(NodeId x, std::size_t start, std::size_t count) {
  check(x);
  if (start + count > static_cast<std::size_t>(value(x).rows())) {
    throw DimensionError("slice_rows: range exceeds input");
  }
  const auto s = static_cast<Eigen::Index>(start);
  const auto n = static_cast<Eigen::Index>(count);
  return push([x, s, n](const Tape& t) -> Matrix { return t.value(x).middleRows(s, n); },
              [x, s, n](Tape& t, const Matrix& g) {
                Matrix full = Matrix::Zero(t.value(x).rows(), t.value(x).cols());
                full.middleRows(s, n) = g;
                t.accumulate(x, full);
              });
}

Tape::NodeId Tape::concat_rows(std::span<const NodeId> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: nothing to concatenate");
  std::vector<NodeId> ids(parts.begin(), parts.end());
  for (NodeId id : ids) {
    check(id);
    if (value(id).cols() != value(ids.front()).cols()) {
      throw DimensionError("concat_rows: column counts differ");
    }
  }
  return push(
      [ids](const Tape& t) -> Matrix {
        Eigen::Index rows = 0;
        for (NodeId id : ids) rows += t.value(id).rows();
        Matrix out(rows, t.value(ids.front()).cols());
        Eigen::Index r = 0;
        for (NodeId id : ids) {
          out.middleRows(r, t.value(id).rows()) = t.value(id);
          r += t.value(id).rows();
        }
        return out;
      },
      [ids](Tape& t, const Matrix& g) {
        Eigen::Index r = 0;
        for (NodeId id : ids) {
          const Eigen::Index n = t.value(id).rows();
          t.accumulate(id, g.middleRows(r, n));
          r += n;
        }
      });
}

Tape::NodeId Tape::gather_rows(NodeId x, std::vector<std::size_t> index) {
  check(x);
  for (std::size_t i : index) {
    if (i >= static_cast<std::size_t>(value(x).rows())) {
      throw DimensionError("gather_rows: index out of range");
    }
  }
  return push(
      [x, index](const Tape& t) -> Matrix {
        const Matrix& in = t.value(x);
        Matrix out(static_cast<Eigen::Index>(index.size()), in.cols());
        for (std::size_t i = 0; i < index.size(); ++i)
          out.row(static_cast<Eigen::Index>(i)) = in.row(static_cast<Eigen::Index>(index[i]));
        return out;
      },
      [x, index](Tape& t, const Matrix& g) {
        Matrix dx = Matrix::Zero(t.value(x).rows(), t.value(x).cols());
        for (std::size_t i = 0; i < index.size(); ++i)
          dx.row(static_cast<Eigen::Index>(index[i])) += g.row(static_cast<Eigen::Index>(i));
        t.accumulate(x, dx);
      });
}

Tape::NodeId Tape::unit_normalize(NodeId x) {
  check(x);
  const NodeId self = nodes_.size();
  return push(
      [x](const Tape& t) -> Matrix {
        Matrix out = t.value(x);
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
          const double n = out.col(c).norm();
          if (n > 0.0) {
            out.col(c) /= n;
          } else {
            out.col(c).setZero();
            out(0, c) = 1.0;
          }
        }
        return out;
      },
      [x, self](Tape& t, const Matrix& g) {
        const Matrix& in = t.value(x);
        const Matrix& y = t.value(self);
        Matrix dx = Matrix::Zero(in.rows(), in.cols());
        for (Eigen::Index c = 0; c < in.cols(); ++c) {
          const double n = in.col(c).norm();
          if (n > 0.0) dx.col(c) = (g.col(c) - y.col(c) * y.col(c).dot(g.col(c))) / n;
        }
        t.accumulate(x, dx);
      });
}

Tape::NodeId Tape::grid_select(NodeId probs, std::vector<double> grid) {
  check(probs);
  const auto levels = static_cast<Eigen::Index>(grid.size());
  if (levels == 0 || value(probs).rows() % levels != 0) {
    throw DimensionError("grid_select: rows not a multiple of the grid size");
  }
  const Eigen::Map<const Vector> g_vec(grid.data(), levels);
  Vector grid_v = g_vec;
  return push(
      [probs, grid_v, levels](const Tape& t) -> Matrix {
        const Matrix& p = t.value(probs);
        const Eigen::Index heads = p.rows() / levels;
        Matrix out(heads, p.cols());
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
          for (Eigen::Index h = 0; h < heads; ++h) {
            Eigen::Index best = 0;
            for (Eigen::Index k = 1; k < levels; ++k) {
              if (p(h * levels + k, c) > p(h * levels + best, c)) best = k;
            }
            out(h, c) = grid_v(best);
          }
        }
        return out;
      },
      [probs, grid_v, levels](Tape& t, const Matrix& g) {
        const Matrix& p = t.value(probs);
        Matrix dp(p.rows(), p.cols());
        const Eigen::Index heads = p.rows() / levels;
        for (Eigen::Index c = 0; c < p.cols(); ++c)
          for (Eigen::Index h = 0; h < heads; ++h)
            dp.col(c).segment(h * levels, levels) = g(h, c) * grid_v;
        t.accumulate(probs, dp);
      });
}

const Matrix& Tape::value(NodeId id) const {
  check(id);
  return nodes_[id].value;
}

const Matrix& Tape::grad(NodeId id) const {
  check(id);
  return nodes_[id].grad;
}

void Tape::backward(NodeId output, const Matrix& seed) {
  if (nodes_.empty()) throw TapeError("backward: empty tape");
  check(output);
  const Matrix& out = nodes_[output].value;
  if (seed.rows() != out.rows() || seed.cols() != out.cols()) {
    throw TapeError("backward: seed shape does not match the output");
  }
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[output].grad = seed;
  for (NodeId i = output + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.size() == 0 || !n.pullback) continue;
    const Matrix g = n.grad;
    n.pullback(*this, g);
  }
  for (auto& n : nodes_) {
    if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
}

void Tape::backward(NodeId output, double loss_grad) {
  check(output);
  if (nodes_[output].value.size() != 1) {
    throw TapeError("backward: scalar seed needs a 1x1 output, tape ends in " +
                    std::to_string(nodes_[output].value.rows()) + "x" +
                    std::to_string(nodes_[output].value.cols()));
  }
  backward(output, Matrix::Constant(1, 1, loss_grad));
}

void Tape::replay() {
  for (auto& n : nodes_) {
    if (n.forward) n.value = n.forward(*this);
  }
}

// ---------------------------------------------------------------------------
// Adam

void Adam::step(std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) throw DimensionError("adam: params/grads count mismatch");
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) throw DimensionError("adam: parameter list changed");
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i];
    if (g.rows() != params[i]->rows() || g.cols() != params[i]->cols()) {
      throw DimensionError("adam: gradient shape mismatch");
    }
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    params[i]->array() -= config_.learning_rate * (m_[i].array() / bc1) /
                          ((v_[i].array() / bc2).sqrt() + config_.epsilon);
  }
}

}  // namespace fdris::nn
