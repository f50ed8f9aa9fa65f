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

#ifndef PROTOAUDIO_ERROR_HPP_
#define PROTOAUDIO_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace protoaudio {

enum class ErrorKind {
  kNotFound,
  kUnsupportedFormat,
  kCorruptContainer,
  kInvalidProfile,
  kDomain,
  kConfig,
  kShapeMismatch,
  kNonFiniteValue,
  kNonScalarLoss,
  kKernelTooLong,
  kDimensionMismatch,
  kInsufficientClasses,
  kInsufficientExamples,
  kCheckpointMismatch,
  kMissingRun,
  kParse,
  kDuplicatePath,
  kEmptyLabelSet,
  kTooFewClasses,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception. `line()` is
// populated (1-based) by the text-format parsers and is 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind),
        line_(line) {}

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  ErrorKind kind_;
  int line_;
};

// Process exit code for an error: 2 config, 3 data, 4 numerical.
int ExitCodeFor(ErrorKind kind);

}  // namespace protoaudio

#endif  // PROTOAUDIO_ERROR_HPP_
