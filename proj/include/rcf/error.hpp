/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace rcf {

enum class ErrorCode {
  UnsupportedLevel,
  CodecUnavailable,
  CorruptFrame,
  LengthMismatch,
  IoFailure,
  InvalidCapacity,
  EmptyPayload,
  WriterClosed,
  BadMagic,
  CorruptFooter,
  IndexOutOfRange,
  RangeOutOfBounds,
  InvalidBlockSize,
  InvalidMix,
  UsageError,
};

/// Stable one-token prefix for diagnostics, e.g. "E_RANGE".
const char* error_prefix(ErrorCode code);

/// Process exit code class: 1 usage, 2 I/O, 3 data corruption.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_prefix(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rcf
