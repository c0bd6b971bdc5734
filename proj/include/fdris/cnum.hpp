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

// Dense complex matrices for channels, beamformers and signals.
//
// Storage is row-major. Problem sizes stay below a few dozen rows, so every
// operation is a plain loop.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fdris {

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix column(std::span<const cplx> values);
  static ComplexMatrix row(std::span<const cplx> values);
  static ComplexMatrix scalar(cplx value);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  // Flat row-major access; convenient for vectors.
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  std::span<cplx> entries() noexcept { return data_; }
  std::span<const cplx> entries() const noexcept { return data_; }

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);

  bool all_finite() const noexcept;
  bool same_shape(const ComplexMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

/// Standard matrix product; throws DimensionError unless a.cols() == b.rows().
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
/// Conjugate transpose.
ComplexMatrix hermitian(const ComplexMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);
/// Kronecker product: block (i, j) of the result is a(i, j) * b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
double frob_norm(const ComplexMatrix& a);
double frob_norm_sq(const ComplexMatrix& a);

/// diag(d) * a, i.e. row i of `a` scaled by d[i].
ComplexMatrix scale_rows(std::span<const cplx> d, const ComplexMatrix& a);
/// a * diag(d).
ComplexMatrix scale_cols(const ComplexMatrix& a, std::span<const cplx> d);
/// Diagonal matrix diag(exp(j*theta)).
ComplexMatrix phase_diagonal(std::span<const double> theta);
std::vector<cplx> phasors(std::span<const double> theta);

/// Value of a 1x1 matrix.
cplx as_scalar(const ComplexMatrix& a);

/// 1/x, with |x| < 1e-30 rejected as singular.
cplx inverse_scalar(cplx x);

}  // namespace fdris
