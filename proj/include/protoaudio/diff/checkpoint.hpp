// Copyright 2026 The protoaudio Authors.
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

// Named-tensor archive. All integers little-endian.
//
//   magic      8 bytes  "PAUDCKPT"
//   version    u32      1
//   n_header   u32      then n_header x (u32 len, key bytes, u32 len, value bytes)
//   n_tensors  u32      then n_tensors x
//                         u32 len, name bytes
//                         u8 dtype (1 = float32, 2 = float64)
//                         u8 rank, rank x u32 dims
//                         raw element bytes, row-major
//   crc32      u32      zlib CRC-32 of every preceding byte

#ifndef PROTOAUDIO_DIFF_CHECKPOINT_HPP_
#define PROTOAUDIO_DIFF_CHECKPOINT_HPP_

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "protoaudio/diff/params.hpp"
#include "protoaudio/diff/tensor.hpp"

namespace protoaudio::diff {

struct NamedTensor {
  std::string name;
  std::variant<Tensor<float>, Tensor<double>> tensor;
};

struct Checkpoint {
  std::map<std::string, std::string> header;
  std::vector<NamedTensor> tensors;

  static Checkpoint FromParameters(const ParameterSet& params,
                                   std::map<std::string, std::string> header = {});
  // Copies float32 tensors into `params` by name; every parameter must be
  // present with a matching shape.
  void RestoreInto(ParameterSet& params) const;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(const std::string& bytes);
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace protoaudio::diff

#endif  // PROTOAUDIO_DIFF_CHECKPOINT_HPP_
