// Copyright 2026 The slamkit Authors. All Rights Reserved.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace slamkit {

enum class ErrorKind {
  kFormat,
  kUnsupported,
  kPrecondition,
  kInfeasible,
  kSize,
  kValidation,
  kIo,
  kTrainingFailed,
  kRuntime,
};

std::string_view to_string(ErrorKind kind);

// Base of every exception thrown by the library. what() carries the message
// without the kind prefix; the CLI renders "error[kind]: message".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(ErrorKind::kFormat, m) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& m)
      : Error(ErrorKind::kUnsupported, m) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& m)
      : Error(ErrorKind::kPrecondition, m) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& m) : Error(ErrorKind::kSize, m) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m)
      : Error(ErrorKind::kValidation, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

class TrainingFailedError : public Error {
 public:
  explicit TrainingFailedError(const std::string& m)
      : Error(ErrorKind::kTrainingFailed, m) {}
};

// CTC label sequence cannot be emitted in the given number of frames.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& m, int min_frames)
      : Error(ErrorKind::kInfeasible, m), min_frames_(min_frames) {}

  int min_frames() const noexcept { return min_frames_; }

 private:
  int min_frames_;
};

// Throws PreconditionError with the message when cond is false.
inline void require(bool cond, const std::string& message) {
  if (!cond) throw PreconditionError(message);
}

}  // namespace slamkit
