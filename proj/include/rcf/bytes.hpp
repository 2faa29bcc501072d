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

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "rcf/error.hpp"

namespace rcf {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

// All on-disk integers are little-endian, fixed width.

inline void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }

inline void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint16_t load_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t load_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::uint64_t load_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

/// Bounds-checked forward cursor over a byte span. Underruns throw the
/// error code the parsing context supplied (CorruptFrame, CorruptFooter, ...).
class ByteCursor {
 public:
  ByteCursor(ByteSpan data, ErrorCode on_underrun)
      : data_(data), on_underrun_(on_underrun) {}

  std::uint8_t u8() { return *take(1).data(); }
  std::uint16_t u16() { return load_u16(take(2).data()); }
  std::uint32_t u32() { return load_u32(take(4).data()); }
  std::uint64_t u64() { return load_u64(take(8).data()); }

  ByteSpan take(std::size_t n) {
    if (n > remaining()) raise(on_underrun_, "truncated input");
    ByteSpan part = data_.subspan(pos_, n);
    pos_ += n;
    return part;
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  ByteSpan data_;
  std::size_t pos_ = 0;
  ErrorCode on_underrun_;
};

inline ByteSpan as_span(const Bytes& b) { return ByteSpan(b.data(), b.size()); }

inline ByteSpan as_span(const char* s, std::size_t n) {
  return ByteSpan(reinterpret_cast<const std::uint8_t*>(s), n);
}

}  // namespace rcf
