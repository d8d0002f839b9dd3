// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace flowrt {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo,
  kFormat,
  kShape,
  kNumeric,
  kTopology,
  kMissing,
};

/// Exception type thrown by every core routine. The code is what the C API
/// reports back to callers as a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace flowrt
