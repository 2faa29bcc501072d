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

#include "rcf/basket.hpp"

namespace rcf {

std::size_t basket_tables_size(std::uint8_t flags, std::uint32_t event_count) {
  std::size_t n = event_count;
  if (flags & kBasketFlagEventFrames) return 4 * (n + 1) + 4 * n;
  if (flags & kBasketFlagUniformLength) return 4;
  return 4 * n;
}

void encode_basket_header(const BasketHeader& header, Bytes& out) {
  put_u8(out, static_cast<std::uint8_t>(header.codec.algorithm));
  put_u8(out, header.codec.level);
  put_u8(out, header.flags);
  put_u8(out, 0);  // reserved
  put_u32(out, header.event_count);
  put_u64(out, header.uncompressed_len);
  put_u64(out, header.compressed_len);
  put_u64(out, header.first_event_index);
}

BasketHeader decode_basket_header(ByteCursor& cursor, ErrorCode on_bad) {
  std::uint8_t algorithm = cursor.u8();
  std::uint8_t level = cursor.u8();
  BasketHeader header;
  header.flags = cursor.u8();
  std::uint8_t reserved = cursor.u8();
  header.event_count = cursor.u32();
  header.uncompressed_len = cursor.u64();
  header.compressed_len = cursor.u64();
  header.first_event_index = cursor.u64();
  header.codec = decode_codec_pair(algorithm, level, on_bad);
  if ((header.flags & ~(kBasketFlagEventFrames | kBasketFlagUniformLength)) != 0)
    raise(on_bad, "unknown basket flag bits");
  if (header.per_event_frames() && header.uniform_length())
    raise(on_bad, "conflicting basket flag bits");
  if (reserved != 0) raise(on_bad, "nonzero reserved byte");
  if (header.event_count == 0) raise(on_bad, "basket with zero events");
  return header;
}

Bytes encode_basket(const BasketRecord& record) {
  const BasketHeader& h = record.header;
  if (record.uncomp_lens.size() != h.event_count)
    raise(ErrorCode::UsageError, "length table does not match event count");
  Bytes out;
  out.reserve(kBasketHeaderSize + h.tables_size() + record.payload.size());
  encode_basket_header(h, out);
  if (h.per_event_frames()) {
    if (record.comp_offsets.size() != std::size_t(h.event_count) + 1)
      raise(ErrorCode::UsageError, "frame table does not match event count");
    for (std::uint32_t v : record.comp_offsets) put_u32(out, v);
  }
  if (h.uniform_length()) {
    for (std::uint32_t v : record.uncomp_lens)
      if (v != record.uncomp_lens.front())
        raise(ErrorCode::UsageError, "uniform flag with unequal event lengths");
    put_u32(out, record.uncomp_lens.front());
  } else {
    for (std::uint32_t v : record.uncomp_lens) put_u32(out, v);
  }
  out.insert(out.end(), record.payload.begin(), record.payload.end());
  return out;
}

BasketRecord decode_basket(ByteSpan image) {
  ByteCursor cursor(image, ErrorCode::CorruptFrame);
  BasketRecord record;
  record.header = decode_basket_header(cursor, ErrorCode::CorruptFrame);
  const BasketHeader& h = record.header;
  const std::uint32_t n = h.event_count;

  if (h.per_event_frames()) {
    record.comp_offsets.resize(std::size_t(n) + 1);
    for (auto& v : record.comp_offsets) v = cursor.u32();
    if (record.comp_offsets.front() != 0)
      raise(ErrorCode::CorruptFrame, "frame table does not start at 0");
    for (std::uint32_t i = 0; i < n; ++i)
      if (record.comp_offsets[i] >= record.comp_offsets[i + 1])
        raise(ErrorCode::CorruptFrame, "frame table not strictly increasing");
    if (record.comp_offsets.back() != h.compressed_len)
      raise(ErrorCode::CorruptFrame, "frame table end != compressed length");
  }

  if (h.uniform_length()) {
    std::uint32_t common = cursor.u32();
    if (common == 0) raise(ErrorCode::CorruptFrame, "zero-length event entry");
    if (std::uint64_t(common) * n != h.uncompressed_len)
      raise(ErrorCode::CorruptFrame, "event lengths do not sum to uncompressed length");
    record.uncomp_lens.assign(n, common);
  } else {
    record.uncomp_lens.resize(n);
    std::uint64_t total = 0;
    for (auto& v : record.uncomp_lens) {
      v = cursor.u32();
      if (v == 0) raise(ErrorCode::CorruptFrame, "zero-length event entry");
      total += v;
    }
    if (total != h.uncompressed_len)
      raise(ErrorCode::CorruptFrame, "event lengths do not sum to uncompressed length");
  }

  if (cursor.remaining() != h.compressed_len)
    raise(ErrorCode::CorruptFrame, "payload length != compressed length");
  ByteSpan payload = cursor.take(h.compressed_len);
  record.payload.assign(payload.begin(), payload.end());
  return record;
}

std::uint64_t event_uncompressed_offset(const BasketRecord& record, std::uint32_t i) {
  if (i >= record.header.event_count)
    raise(ErrorCode::IndexOutOfRange, "event index out of basket");
  std::uint64_t off = 0;
  for (std::uint32_t k = 0; k < i; ++k) off += record.uncomp_lens[k];
  return off;
}

std::pair<std::uint32_t, std::uint32_t> event_frame_range(const BasketRecord& record,
                                                          std::uint32_t i) {
  if (!record.header.per_event_frames())
    raise(ErrorCode::UsageError, "basket has no per-event frames");
  if (i >= record.header.event_count)
    raise(ErrorCode::IndexOutOfRange, "event index out of basket");
  return {record.comp_offsets[i], record.comp_offsets[i + 1]};
}

}  // namespace rcf
