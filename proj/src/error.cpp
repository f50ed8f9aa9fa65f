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

#include "protoaudio/error.hpp"

namespace protoaudio {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return "NotFound";
    case ErrorKind::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::kCorruptContainer: return "CorruptContainer";
    case ErrorKind::kInvalidProfile: return "InvalidProfile";
    case ErrorKind::kDomain: return "DomainError";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kNonFiniteValue: return "NonFiniteValue";
    case ErrorKind::kNonScalarLoss: return "NonScalarLoss";
    case ErrorKind::kKernelTooLong: return "KernelTooLong";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kInsufficientClasses: return "InsufficientClasses";
    case ErrorKind::kInsufficientExamples: return "InsufficientExamples";
    case ErrorKind::kCheckpointMismatch: return "CheckpointMismatch";
    case ErrorKind::kMissingRun: return "MissingRun";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kDuplicatePath: return "DuplicatePath";
    case ErrorKind::kEmptyLabelSet: return "EmptyLabelSet";
    case ErrorKind::kTooFewClasses: return "TooFewClasses";
    case ErrorKind::kIo: return "IOError";
  }
  return "Error";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidProfile:
    case ErrorKind::kDomain:
    case ErrorKind::kKernelTooLong:
    case ErrorKind::kDimensionMismatch:
      return 2;
    case ErrorKind::kShapeMismatch:
    case ErrorKind::kNonFiniteValue:
    case ErrorKind::kNonScalarLoss:
      return 4;
    default:
      return 3;
  }
}

}  // namespace protoaudio
