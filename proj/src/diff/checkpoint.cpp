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

#include "protoaudio/diff/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <zlib.h>

namespace protoaudio::diff {
namespace {

constexpr char kMagic[8] = {'P', 'A', 'U', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kFloat32 = 1;
constexpr std::uint8_t kFloat64 = 2;

class Writer {
 public:
  void Bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void U8(std::uint8_t v) { Bytes(&v, 1); }
  void U32(std::uint32_t v) { Bytes(&v, 4); }
  void Str(const std::string& s) {
    U32(static_cast<std::uint32_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& in, std::size_t end) : in_(in), end_(end) {}
  void Bytes(void* p, std::size_t n) {
    if (n > end_ - pos_) throw Error(ErrorKind::kCorruptContainer, "checkpoint truncated");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t U8() {
    std::uint8_t v;
    Bytes(&v, 1);
    return v;
  }
  std::uint32_t U32() {
    std::uint32_t v;
    Bytes(&v, 4);
    return v;
  }
  std::string Str() {
    const std::uint32_t n = U32();
    if (n > end_ - pos_) throw Error(ErrorKind::kCorruptContainer, "checkpoint truncated");
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::string& in_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

template <typename T>
void WriteTensor(Writer& w, const Tensor<T>& t, std::uint8_t dtype) {
  w.U8(dtype);
  w.U8(static_cast<std::uint8_t>(t.shape.size()));
  for (std::size_t d : t.shape) w.U32(static_cast<std::uint32_t>(d));
  w.Bytes(t.data.data(), t.data.size() * sizeof(T));
}

template <typename T>
Tensor<T> ReadPayload(Reader& r, Shape shape) {
  Tensor<T> t(std::move(shape));
  r.Bytes(t.data.data(), t.data.size() * sizeof(T));
  return t;
}

}  // namespace

Checkpoint Checkpoint::FromParameters(const ParameterSet& params,
                                      std::map<std::string, std::string> header) {
  Checkpoint c;
  c.header = std::move(header);
  for (std::size_t i = 0; i < params.size(); ++i) {
    c.tensors.push_back({params.name(i), params[i]});
  }
  return c;
}

void Checkpoint::RestoreInto(ParameterSet& params) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const NamedTensor* found = nullptr;
    for (const NamedTensor& nt : tensors) {
      if (nt.name == params.name(i)) found = &nt;
    }
    if (!found) {
      throw Error(ErrorKind::kCheckpointMismatch, "checkpoint lacks parameter " + params.name(i));
    }
    const auto* t = std::get_if<Tensor<float>>(&found->tensor);
    if (!t || t->shape != params[i].shape) {
      throw Error(ErrorKind::kCheckpointMismatch,
                  "parameter " + params.name(i) + " has shape " + ShapeString(params[i].shape) +
                      " in the model but a different shape or dtype in the checkpoint");
    }
    params[i].data = t->data;
  }
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kVersion);
  w.U32(static_cast<std::uint32_t>(ckpt.header.size()));
  for (const auto& [k, v] : ckpt.header) {
    w.Str(k);
    w.Str(v);
  }
  w.U32(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const NamedTensor& nt : ckpt.tensors) {
    w.Str(nt.name);
    if (const auto* f = std::get_if<Tensor<float>>(&nt.tensor)) {
      WriteTensor(w, *f, kFloat32);
    } else {
      WriteTensor(w, std::get<Tensor<double>>(nt.tensor), kFloat64);
    }
  }
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(w.str().data()), static_cast<uInt>(w.str().size())));
  w.U32(crc);
  return std::move(w.str());
}

Checkpoint ParseCheckpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kCorruptContainer, "not a checkpoint (bad magic)");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(body)));
  if (stored != actual) throw Error(ErrorKind::kCorruptContainer, "checkpoint checksum mismatch");

  Reader r(bytes, body);
  char magic[8];
  r.Bytes(magic, 8);
  if (const std::uint32_t version = r.U32(); version != kVersion) {
    throw Error(ErrorKind::kCorruptContainer,
                "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint c;
  const std::uint32_t n_header = r.U32();
  for (std::uint32_t i = 0; i < n_header; ++i) {
    std::string k = r.Str();
    c.header[k] = r.Str();
  }
  const std::uint32_t n_tensors = r.U32();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    NamedTensor nt;
    nt.name = r.Str();
    const std::uint8_t dtype = r.U8();
    const std::uint8_t rank = r.U8();
    Shape shape(rank);
    for (auto& d : shape) d = r.U32();
    if (dtype == kFloat32) {
      nt.tensor = ReadPayload<float>(r, std::move(shape));
    } else if (dtype == kFloat64) {
      nt.tensor = ReadPayload<double>(r, std::move(shape));
    } else {
      throw Error(ErrorKind::kCorruptContainer, "unknown dtype tag " + std::to_string(dtype));
    }
    c.tensors.push_back(std::move(nt));
  }
  if (!r.done()) throw Error(ErrorKind::kCorruptContainer, "trailing bytes in checkpoint");
  return c;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = SerializeCheckpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingRun, "checkpoint not found: " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseCheckpoint(bytes);
}

}  // namespace protoaudio::diff
