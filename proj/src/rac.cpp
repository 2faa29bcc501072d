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

#include "rcf/rac.hpp"

#include <limits>

namespace rcf {

namespace {

void check_events(const std::vector<Bytes>& events) {
  if (events.empty()) raise(ErrorCode::EmptyPayload, "basket needs at least one event");
  if (events.size() > std::numeric_limits<std::uint32_t>::max())
    raise(ErrorCode::RangeOutOfBounds, "too many events for one basket");
  for (const Bytes& e : events) {
    if (e.empty()) raise(ErrorCode::EmptyPayload, "empty event payload");
    if (e.size() > std::numeric_limits<std::uint32_t>::max())
      raise(ErrorCode::RangeOutOfBounds, "event exceeds u32 length");
  }
}

BasketHeader make_header(const std::vector<Bytes>& events, const CodecSpec& spec,
                         std::uint8_t flags, std::uint64_t first_event_index) {
  BasketHeader header;
  header.codec = spec;
  header.flags = flags;
  header.event_count = static_cast<std::uint32_t>(events.size());
  header.first_event_index = first_event_index;
  for (const Bytes& e : events) header.uncompressed_len += e.size();
  return header;
}

}  // namespace

BasketRecord pack_plain_basket(const std::vector<Bytes>& events,
                               const CodecSpec& spec,
                               std::uint64_t first_event_index,
                               CodecCounters* counters) {
  spec.validate();
  check_events(events);
  bool uniform = true;
  for (const Bytes& e : events) uniform = uniform && e.size() == events.front().size();
  BasketRecord record;
  record.header = make_header(events, spec,
                              uniform ? kBasketFlagUniformLength : std::uint8_t(0),
                              first_event_index);
  Bytes joined;
  joined.reserve(record.header.uncompressed_len);
  for (const Bytes& e : events) {
    record.uncomp_lens.push_back(static_cast<std::uint32_t>(e.size()));
    joined.insert(joined.end(), e.begin(), e.end());
  }
  record.payload = compress(spec, joined, counters);
  record.header.compressed_len = record.payload.size();
  return record;
}

BasketRecord pack_event_frames_basket(const std::vector<Bytes>& events,
                                      const CodecSpec& spec,
                                      std::uint64_t first_event_index,
                                      CodecCounters* counters) {
  spec.validate();
  check_events(events);
  BasketRecord record;
  record.header = make_header(events, spec, kBasketFlagEventFrames, first_event_index);
  record.comp_offsets.push_back(0);
  for (const Bytes& e : events) {
    record.uncomp_lens.push_back(static_cast<std::uint32_t>(e.size()));
    Bytes frame = compress(spec, e, counters);
    record.payload.insert(record.payload.end(), frame.begin(), frame.end());
    if (record.payload.size() > std::numeric_limits<std::uint32_t>::max())
      raise(ErrorCode::RangeOutOfBounds, "frame table exceeds u32 offsets");
    record.comp_offsets.push_back(static_cast<std::uint32_t>(record.payload.size()));
  }
  record.header.compressed_len = record.payload.size();
  return record;
}

Bytes unpack_event(const BasketRecord& record, std::uint32_t i,
                   CodecCounters* counters) {
  if (i >= record.header.event_count)
    raise(ErrorCode::IndexOutOfRange, "event index out of basket");
  if (record.header.per_event_frames()) {
    auto [begin, end] = event_frame_range(record, i);
    ByteSpan frame(record.payload.data() + begin, end - begin);
    return decompress(record.header.codec, frame, record.uncomp_lens[i], counters);
  }
  Bytes whole = decompress(record.header.codec, record.payload,
                           record.header.uncompressed_len, counters);
  std::uint64_t off = event_uncompressed_offset(record, i);
  return Bytes(whole.begin() + off, whole.begin() + off + record.uncomp_lens[i]);
}

std::vector<Bytes> unpack_all(const BasketRecord& record, CodecCounters* counters) {
  std::vector<Bytes> events;
  events.reserve(record.header.event_count);
  if (record.header.per_event_frames()) {
    for (std::uint32_t i = 0; i < record.header.event_count; ++i)
      events.push_back(unpack_event(record, i, counters));
    return events;
  }
  Bytes whole = decompress(record.header.codec, record.payload,
                           record.header.uncompressed_len, counters);
  std::uint64_t off = 0;
  for (std::uint32_t len : record.uncomp_lens) {
    events.emplace_back(whole.begin() + off, whole.begin() + off + len);
    off += len;
  }
  return events;
}

std::uint64_t access_cost_bytes(const BasketRecord& record, std::uint32_t i) {
  if (i >= record.header.event_count)
    raise(ErrorCode::IndexOutOfRange, "event index out of basket");
  std::uint64_t fixed = kBasketHeaderSize + record.header.tables_size();
  if (!record.header.per_event_frames())
    return fixed + record.header.compressed_len;
  auto [begin, end] = event_frame_range(record, i);
  return fixed + (end - begin);
}

}  // namespace rcf
