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

#include "fdris/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fdris/errors.hpp"

namespace fdris {

namespace {

constexpr char kMagic[5] = {'R', 'F', 'L', 'B', '1'};

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(v);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  template <class T>
  T get() {
    need(sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      return std::bit_cast<double>(bits);
    } else {
      return static_cast<T>(bits);
    }
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint: truncated record");
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void TensorArchive::add(std::string name, std::vector<std::uint64_t> dims,
                        std::vector<double> values) {
  std::uint64_t count = 1;
  for (auto d : dims) count *= d;
  if (count != values.size()) throw CheckpointError("checkpoint: payload size mismatch for " + name);
  records_.push_back({std::move(name), std::move(dims), std::move(values)});
}

void TensorArchive::add_matrix(std::string name, const nn::Matrix& m) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  add(std::move(name),
      {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())},
      std::move(values));
}

void TensorArchive::add_scalar(std::string name, double v) { add(std::move(name), {}, {v}); }

const TensorRecord* TensorArchive::find(const std::string& name) const {
  for (const auto& r : records_)
    if (r.name == name) return &r;
  return nullptr;
}

void TensorArchive::load_matrix(const std::string& name, nn::Matrix& m) const {
  const TensorRecord* r = find(name);
  if (r == nullptr) throw CheckpointError("checkpoint: missing tensor " + name);
  if (r->dims.size() != 2 || r->dims[0] != static_cast<std::uint64_t>(m.rows()) ||
      r->dims[1] != static_cast<std::uint64_t>(m.cols())) {
    throw CheckpointError("checkpoint: shape mismatch for " + name);
  }
  std::size_t i = 0;
  for (Eigen::Index row = 0; row < m.rows(); ++row)
    for (Eigen::Index col = 0; col < m.cols(); ++col) m(row, col) = r->values[i++];
}

double TensorArchive::scalar(const std::string& name) const {
  const TensorRecord* r = find(name);
  if (r == nullptr || r->values.size() != 1) {
    throw CheckpointError("checkpoint: missing scalar " + name);
  }
  return r->values[0];
}

std::vector<std::uint8_t> TensorArchive::serialize() const {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kVersion);
  for (const auto& r : records_) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.name.size()));
    out.insert(out.end(), r.name.begin(), r.name.end());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.dims.size()));
    for (auto d : r.dims) put_le<std::uint64_t>(out, d);
    for (double v : r.values) put_le<double>(out, v);
  }
  return out;
}

TensorArchive TensorArchive::deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("checkpoint: bad magic");
  }
  const std::vector<std::uint8_t> body(bytes.begin() + sizeof(kMagic), bytes.end());
  Reader in(body);
  const auto version = in.get<std::uint32_t>();
  if (version != kVersion) {
    throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
  }
  TensorArchive archive;
  while (!in.done()) {
    TensorRecord r;
    r.name = in.get_string(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      r.dims.push_back(in.get<std::uint64_t>());
      count *= r.dims.back();
    }
    if (count > body.size() / 8) throw CheckpointError("checkpoint: implausible tensor size");
    r.values.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) r.values.push_back(in.get<double>());
    archive.records_.push_back(std::move(r));
  }
  return archive;
}

void TensorArchive::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("checkpoint: cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw CheckpointError("checkpoint: write failed for " + path.string());
}

TensorArchive TensorArchive::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("checkpoint: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace fdris
