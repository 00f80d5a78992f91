// Copyright 2026 The STT Tracking Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stt/autodiff/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace stt::ad {
namespace {

constexpr std::array<char, 8> kMagic = {'S', 'T', 'T', 'C', 'K', 'P', 'T', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw CheckpointError("checkpoint truncated");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

std::string get_bytes(std::istream& in, std::uint32_t n) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw CheckpointError("checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(checkpoint.metadata.size()));
  out.write(checkpoint.metadata.data(), static_cast<std::streamsize>(checkpoint.metadata.size()));
  put_u32(out, static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const NamedTensor& t : checkpoint.tensors) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.tensor.rows()));
    put_u32(out, static_cast<std::uint32_t>(t.tensor.cols()));
  }
  for (const NamedTensor& t : checkpoint.tensors) {
    for (double v : t.tensor.data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) throw CheckpointError("failed writing checkpoint");
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, checkpoint);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw CheckpointError("not a checkpoint (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint checkpoint;
  checkpoint.metadata = get_bytes(in, get_u32(in));
  const std::uint32_t count = get_u32(in);
  std::vector<std::array<std::uint32_t, 2>> dims;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = get_bytes(in, get_u32(in));
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    dims.push_back({rows, cols});
    checkpoint.tensors.push_back(std::move(t));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor tensor(dims[i][0], dims[i][1]);
    for (double& v : tensor.data()) v = std::bit_cast<float>(get_u32(in));
    checkpoint.tensors[i].tensor = std::move(tensor);
  }
  return checkpoint;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace stt::ad
