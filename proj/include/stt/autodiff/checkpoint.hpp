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

#pragma once

#include "stt/autodiff/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace stt::ad {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter checkpoint layout (all integers little-endian):
//
//   magic        8 bytes  "STTCKPT\0"
//   version      u32      kCheckpointVersion
//   meta_len     u32      followed by meta_len bytes of UTF-8 metadata
//   count        u32      number of tensors
//   table        count x { name_len u32, name bytes, rows u32, cols u32 }
//   payload      for each tensor in table order, rows*cols IEEE-754 float32
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct Checkpoint {
  std::string metadata;
  std::vector<NamedTensor> tensors;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace stt::ad
