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

#include "rcf/error.hpp"

namespace rcf {

const char* error_prefix(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedLevel: return "E_LEVEL";
    case ErrorCode::CodecUnavailable: return "E_CODEC";
    case ErrorCode::CorruptFrame: return "E_CORRUPT";
    case ErrorCode::LengthMismatch: return "E_LENGTH";
    case ErrorCode::IoFailure: return "E_IO";
    case ErrorCode::InvalidCapacity: return "E_CAPACITY";
    case ErrorCode::EmptyPayload: return "E_EMPTY";
    case ErrorCode::WriterClosed: return "E_CLOSED";
    case ErrorCode::BadMagic: return "E_MAGIC";
    case ErrorCode::CorruptFooter: return "E_FOOTER";
    case ErrorCode::IndexOutOfRange: return "E_RANGE";
    case ErrorCode::RangeOutOfBounds: return "E_RANGE";
    case ErrorCode::InvalidBlockSize: return "E_BLOCKSIZE";
    case ErrorCode::InvalidMix: return "E_MIX";
    case ErrorCode::UsageError: return "E_USAGE";
  }
  return "E_UNKNOWN";
}

// 1: caller mistakes (bad arguments, out-of-range requests).
// 2: environment trouble (I/O, codec backend failure).
// 3: damaged input data.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedLevel:
    case ErrorCode::InvalidCapacity:
    case ErrorCode::EmptyPayload:
    case ErrorCode::WriterClosed:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::RangeOutOfBounds:
    case ErrorCode::InvalidBlockSize:
    case ErrorCode::InvalidMix:
    case ErrorCode::UsageError:
      return 1;
    case ErrorCode::CodecUnavailable:
    case ErrorCode::IoFailure:
      return 2;
    case ErrorCode::CorruptFrame:
    case ErrorCode::LengthMismatch:
    case ErrorCode::BadMagic:
    case ErrorCode::CorruptFooter:
      return 3;
  }
  return 1;
}

}  // namespace rcf
