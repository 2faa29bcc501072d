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
#include <utility>
#include <vector>

#include "rcf/bytes.hpp"
#include "rcf/codec.hpp"

namespace rcf {

// On-disk basket image:
//
//   header        32 bytes, fixed
//   comp_offsets  u32 x (event_count + 1)   flags bit0 only
//   uncomp_lens   u32 x event_count         bit0 set, or bit0 and bit1 clear
//   event_len     u32                       flags bit1 only
//   payload       compressed_len bytes
//
// With bit0 (per-event frames) the payload is one codec frame per event and
// comp_offsets delimits them; otherwise it is a single frame over the
// concatenated events. bit1 marks a basket whose events all share one
// length, stored once. bit0 and bit1 are mutually exclusive; bit0 baskets
// always carry the full uncomp_lens array.

inline constexpr std::size_t kBasketHeaderSize = 32;
inline constexpr std::uint8_t kBasketFlagEventFrames = 0x01;
inline constexpr std::uint8_t kBasketFlagUniformLength = 0x02;

std::size_t basket_tables_size(std::uint8_t flags, std::uint32_t event_count);

struct BasketHeader {
  CodecSpec codec;
  std::uint8_t flags = 0;
  std::uint32_t event_count = 0;
  std::uint64_t uncompressed_len = 0;
  std::uint64_t compressed_len = 0;
  std::uint64_t first_event_index = 0;

  bool per_event_frames() const { return (flags & kBasketFlagEventFrames) != 0; }
  bool uniform_length() const { return (flags & kBasketFlagUniformLength) != 0; }

  std::size_t tables_size() const { return basket_tables_size(flags, event_count); }
};

struct BasketRecord {
  BasketHeader header;
  std::vector<std::uint32_t> comp_offsets;  // event_count + 1 entries, or empty
  std::vector<std::uint32_t> uncomp_lens;   // always event_count entries in memory
  Bytes payload;
};

void encode_basket_header(const BasketHeader& header, Bytes& out);

// on_bad is raised for any malformed field: unknown codec pair, unknown or
// conflicting flag bits, zero event count.
BasketHeader decode_basket_header(ByteCursor& cursor, ErrorCode on_bad);

// Serializes header, tables and payload into one contiguous image. The
// uniform-length form is chosen by header.flags; lengths must then agree.
Bytes encode_basket(const BasketRecord& record);

// Parses and validates a full basket image. Every structural invariant is
// checked before the payload is touched: table arithmetic, offset monotony,
// length sums. Raises CorruptFrame on any violation.
BasketRecord decode_basket(ByteSpan image);

// Uncompressed byte offset of event i inside the concatenated event buffer.
std::uint64_t event_uncompressed_offset(const BasketRecord& record, std::uint32_t i);

// Payload byte range [first, second) of event i's codec frame. Only valid
// for per-event-frame baskets.
std::pair<std::uint32_t, std::uint32_t> event_frame_range(const BasketRecord& record,
                                                          std::uint32_t i);

}  // namespace rcf
