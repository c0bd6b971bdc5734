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

// Flat binary tensor container.
//
// Layout (all integers little-endian):
//   magic   "RFLB1" (5 bytes)
//   version u32
//   records until end of file:
//     name_len u32, name bytes, rank u32, dims u64[rank], payload f64[prod(dims)]
// Matrices are written with rank 2 in row-major order; scalars use rank 0.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fdris/nnet.hpp"

namespace fdris {

struct TensorRecord {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

class TensorArchive {
 public:
  static constexpr std::uint32_t kVersion = 1;

  void add(std::string name, std::vector<std::uint64_t> dims, std::vector<double> values);
  void add_matrix(std::string name, const nn::Matrix& m);
  void add_scalar(std::string name, double v);

  const std::vector<TensorRecord>& records() const noexcept { return records_; }
  const TensorRecord* find(const std::string& name) const;
  /// Copies a rank-2 record into `m`; throws CheckpointError on a missing
  /// name or shape mismatch.
  void load_matrix(const std::string& name, nn::Matrix& m) const;
  double scalar(const std::string& name) const;

  std::vector<std::uint8_t> serialize() const;
  static TensorArchive deserialize(const std::vector<std::uint8_t>& bytes);

  void save(const std::filesystem::path& path) const;
  static TensorArchive load(const std::filesystem::path& path);

 private:
  std::vector<TensorRecord> records_;
};

}  // namespace fdris
