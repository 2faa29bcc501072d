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

#include "rcf/container.hpp"

#include <algorithm>
#include <cstring>

#include "rcf/rac.hpp"

namespace rcf {

namespace {

constexpr std::size_t kTableCacheEntries = 256;

std::uint64_t validated_capacity(std::uint64_t capacity) {
  if (capacity < kMinBasketCapacity)
    raise(ErrorCode::InvalidCapacity,
          "basket capacity " + std::to_string(capacity) + " below minimum " +
              std::to_string(kMinBasketCapacity));
  return capacity;
}

CodecSpec validated_codec(const CodecSpec& codec) {
  codec.validate();
  return codec;
}

void check_basket_flags(std::uint8_t flags, ErrorCode on_bad) {
  if ((flags & ~(kBasketFlagEventFrames | kBasketFlagUniformLength)) != 0)
    raise(on_bad, "unknown basket flag bits");
  if ((flags & kBasketFlagEventFrames) && (flags & kBasketFlagUniformLength))
    raise(on_bad, "conflicting basket flag bits");
}

std::uint64_t cache_key(std::size_t branch_ordinal, std::size_t basket_ordinal) {
  return (static_cast<std::uint64_t>(branch_ordinal) << 40) |
         static_cast<std::uint64_t>(basket_ordinal);
}

}  // namespace

std::uint64_t BranchIndex::stored_bytes() const {
  std::uint64_t total = 0;
  for (const BasketLocator& loc : locators) total += loc.image_size();
  return total;
}

const BranchIndex* TreeIndex::find(std::string_view name) const {
  for (const BranchIndex& b : branches)
    if (b.name == name) return &b;
  return nullptr;
}

const BranchIndex& TreeIndex::at(std::string_view name) const {
  const BranchIndex* b = find(name);
  if (!b)
    raise(ErrorCode::IndexOutOfRange, "unknown branch '" + std::string(name) + "'");
  return *b;
}

Bytes encode_footer(const TreeIndex& index) {
  Bytes out;
  put_u32(out, static_cast<std::uint32_t>(index.branches.size()));
  for (const BranchIndex& b : index.branches) {
    if (b.name.empty() || b.name.size() > 65535)
      raise(ErrorCode::UsageError, "branch name length out of range");
    put_u16(out, static_cast<std::uint16_t>(b.name.size()));
    out.insert(out.end(), b.name.begin(), b.name.end());
    put_u32(out, static_cast<std::uint32_t>(b.locators.size()));
    for (const BasketLocator& loc : b.locators) {
      put_u64(out, loc.file_offset);
      put_u64(out, loc.compressed_len);
      put_u32(out, loc.event_count);
      put_u64(out, loc.first_event_index);
      put_u8(out, static_cast<std::uint8_t>(loc.codec.algorithm));
      put_u8(out, loc.codec.level);
      put_u8(out, loc.flags);
      put_u8(out, 0);  // pad
    }
  }
  return out;
}

TreeIndex decode_footer(ByteSpan footer) {
  ByteCursor cursor(footer, ErrorCode::CorruptFooter);
  TreeIndex index;
  std::uint32_t branch_count = cursor.u32();
  index.branches.reserve(branch_count);
  for (std::uint32_t b = 0; b < branch_count; ++b) {
    BranchIndex branch;
    std::uint16_t name_len = cursor.u16();
    if (name_len == 0) raise(ErrorCode::CorruptFooter, "empty branch name");
    ByteSpan name = cursor.take(name_len);
    branch.name.assign(name.begin(), name.end());
    if (index.find(branch.name))
      raise(ErrorCode::CorruptFooter, "duplicate branch name '" + branch.name + "'");
    std::uint32_t locator_count = cursor.u32();
    branch.locators.reserve(locator_count);
    std::uint64_t next_event_index = 0;
    for (std::uint32_t k = 0; k < locator_count; ++k) {
      BasketLocator loc;
      loc.file_offset = cursor.u64();
      loc.compressed_len = cursor.u64();
      loc.event_count = cursor.u32();
      loc.first_event_index = cursor.u64();
      std::uint8_t algorithm = cursor.u8();
      std::uint8_t level = cursor.u8();
      loc.flags = cursor.u8();
      std::uint8_t pad = cursor.u8();
      loc.codec = decode_codec_pair(algorithm, level, ErrorCode::CorruptFooter);
      check_basket_flags(loc.flags, ErrorCode::CorruptFooter);
      if (pad != 0) raise(ErrorCode::CorruptFooter, "nonzero locator pad");
      if (loc.event_count == 0)
        raise(ErrorCode::CorruptFooter, "locator with zero events");
      if (loc.compressed_len == 0)
        raise(ErrorCode::CorruptFooter, "locator with zero payload");
      if (loc.first_event_index != next_event_index)
        raise(ErrorCode::CorruptFooter, "locators do not tile the event index space");
      next_event_index = loc.end_event_index();
      branch.locators.push_back(loc);
    }
    index.branches.push_back(std::move(branch));
  }
  if (!cursor.done())
    raise(ErrorCode::CorruptFooter, "trailing bytes after footer");
  return index;
}

TreeWriter::TreeWriter(const std::string& path, std::uint64_t basket_capacity,
                       const CodecSpec& codec, bool event_frames)
    : capacity_(validated_capacity(basket_capacity)),
      codec_(validated_codec(codec)),
      event_frames_(event_frames),
      out_(path) {
  Bytes header;
  header.insert(header.end(), kContainerMagic, kContainerMagic + 4);
  put_u16(header, kContainerVersion);
  put_u16(header, 0);  // reserved
  out_.write(header);
}

void TreeWriter::append(std::string_view branch, ByteSpan payload) {
  if (!open_) raise(ErrorCode::WriterClosed, "append after finalize");
  if (payload.empty()) raise(ErrorCode::EmptyPayload, "empty event payload");
  if (branch.empty() || branch.size() > 65535)
    raise(ErrorCode::UsageError, "branch name length out of range");
  auto [it, inserted] =
      branch_ordinals_.try_emplace(std::string(branch), branches_.size());
  if (inserted) {
    branches_.emplace_back();
    branches_.back().name = branch;
  }
  OpenBranch& b = branches_[it->second];
  b.buffer.emplace_back(payload.begin(), payload.end());
  b.buffered_bytes += payload.size();
  if (b.buffered_bytes >= capacity_) seal(b);
}

void TreeWriter::seal(OpenBranch& branch) {
  BasketRecord record =
      event_frames_
          ? pack_event_frames_basket(branch.buffer, codec_,
                                     branch.next_event_index, &counters_)
          : pack_plain_basket(branch.buffer, codec_, branch.next_event_index,
                              &counters_);
  BasketLocator loc;
  loc.file_offset = out_.offset();
  loc.compressed_len = record.header.compressed_len;
  loc.event_count = record.header.event_count;
  loc.first_event_index = record.header.first_event_index;
  loc.codec = codec_;
  loc.flags = record.header.flags;
  out_.write(encode_basket(record));
  branch.locators.push_back(loc);
  branch.next_event_index += record.header.event_count;
  branch.buffer.clear();
  branch.buffered_bytes = 0;
}

TreeIndex TreeWriter::finalize() {
  if (!open_) raise(ErrorCode::WriterClosed, "finalize called twice");
  for (OpenBranch& b : branches_)
    if (!b.buffer.empty()) seal(b);
  TreeIndex index;
  index.branches.reserve(branches_.size());
  for (OpenBranch& b : branches_)
    index.branches.push_back(BranchIndex{b.name, std::move(b.locators)});
  std::uint64_t footer_offset = out_.offset();
  out_.write(encode_footer(index));
  Bytes trailer;
  put_u64(trailer, footer_offset);
  trailer.insert(trailer.end(), kContainerMagic, kContainerMagic + 4);
  out_.write(trailer);
  out_.close();
  open_ = false;
  return index;
}

TreeReader::TreeReader(const std::string& path, std::size_t cache_entries)
    : in_(path), cache_entries_(cache_entries) {
  if (in_.size() < kContainerHeaderSize + kContainerTrailerSize)
    raise(ErrorCode::BadMagic, "file too short for header and trailer");
  Bytes head = in_.read_at(0, kContainerHeaderSize);
  if (std::memcmp(head.data(), kContainerMagic, 4) != 0)
    raise(ErrorCode::BadMagic, "bad magic");
  if (load_u16(head.data() + 4) != kContainerVersion)
    raise(ErrorCode::BadMagic, "unsupported format version");
  if (load_u16(head.data() + 6) != 0)
    raise(ErrorCode::BadMagic, "nonzero reserved field");

  Bytes trailer = in_.read_at(in_.size() - kContainerTrailerSize,
                              kContainerTrailerSize);
  if (std::memcmp(trailer.data() + 8, kContainerMagic, 4) != 0)
    raise(ErrorCode::CorruptFooter, "bad trailer magic");
  std::uint64_t footer_offset = load_u64(trailer.data());
  if (footer_offset < kContainerHeaderSize ||
      footer_offset > in_.size() - kContainerTrailerSize)
    raise(ErrorCode::CorruptFooter, "footer offset out of file");
  data_end_ = footer_offset;

  Bytes footer = in_.read_at(
      footer_offset,
      static_cast<std::size_t>(in_.size() - kContainerTrailerSize - footer_offset));
  index_ = decode_footer(footer);

  for (const BranchIndex& b : index_.branches)
    for (const BasketLocator& loc : b.locators)
      if (loc.file_offset < kContainerHeaderSize ||
          loc.file_offset + loc.image_size() > data_end_)
        raise(ErrorCode::CorruptFooter, "basket locator outside data region");
}

std::uint64_t TreeReader::event_count(std::string_view branch) const {
  return index_.at(branch).event_count();
}

TreeReader::Located TreeReader::locate(std::string_view branch,
                                       std::uint64_t index) const {
  for (std::size_t ord = 0; ord < index_.branches.size(); ++ord) {
    const BranchIndex& b = index_.branches[ord];
    if (b.name != branch) continue;
    if (index >= b.event_count())
      raise(ErrorCode::IndexOutOfRange,
            "event " + std::to_string(index) + " past end of branch '" +
                b.name + "'");
    auto it = std::upper_bound(
        b.locators.begin(), b.locators.end(), index,
        [](std::uint64_t v, const BasketLocator& l) {
          return v < l.first_event_index;
        });
    --it;
    return Located{ord, &*it,
                   static_cast<std::size_t>(it - b.locators.begin()),
                   static_cast<std::uint32_t>(index - it->first_event_index)};
  }
  raise(ErrorCode::IndexOutOfRange, "unknown branch '" + std::string(branch) + "'");
}

BasketHeader TreeReader::fetch_header_checked(const BasketLocator& loc,
                                              ByteCursor& cursor) const {
  BasketHeader header = decode_basket_header(cursor, ErrorCode::CorruptFrame);
  if (!(header.codec == loc.codec) || header.flags != loc.flags ||
      header.event_count != loc.event_count ||
      header.compressed_len != loc.compressed_len ||
      header.first_event_index != loc.first_event_index)
    raise(ErrorCode::CorruptFrame, "basket header disagrees with directory");
  return header;
}

// Caller holds mu_.
TreeReader::TablesPtr TreeReader::tables_for(const Located& at) const {
  std::uint64_t key = cache_key(at.branch_ordinal, at.basket_ordinal);
  if (auto it = table_map_.find(key); it != table_map_.end()) {
    table_lru_.splice(table_lru_.begin(), table_lru_, it->second);
    return it->second->second;
  }
  const BasketLocator& loc = *at.locator;
  std::size_t fetch_len =
      kBasketHeaderSize + basket_tables_size(loc.flags, loc.event_count);
  Bytes head = in_.read_at(loc.file_offset, fetch_len);
  ByteCursor cursor(head, ErrorCode::CorruptFrame);
  BasketHeader header = fetch_header_checked(loc, cursor);

  auto tables = std::make_shared<CachedTables>();
  const std::uint32_t n = header.event_count;
  tables->comp_offsets.resize(std::size_t(n) + 1);
  for (auto& v : tables->comp_offsets) v = cursor.u32();
  if (tables->comp_offsets.front() != 0)
    raise(ErrorCode::CorruptFrame, "frame table does not start at 0");
  for (std::uint32_t i = 0; i < n; ++i)
    if (tables->comp_offsets[i] >= tables->comp_offsets[i + 1])
      raise(ErrorCode::CorruptFrame, "frame table not strictly increasing");
  if (tables->comp_offsets.back() != header.compressed_len)
    raise(ErrorCode::CorruptFrame, "frame table end != compressed length");
  tables->uncomp_lens.resize(n);
  std::uint64_t total = 0;
  for (auto& v : tables->uncomp_lens) {
    v = cursor.u32();
    if (v == 0) raise(ErrorCode::CorruptFrame, "zero-length event entry");
    total += v;
  }
  if (total != header.uncompressed_len)
    raise(ErrorCode::CorruptFrame, "event lengths do not sum to uncompressed length");

  stats_.baskets_fetched += 1;
  stats_.bytes_fetched += fetch_len;

  table_lru_.emplace_front(key, tables);
  table_map_[key] = table_lru_.begin();
  while (table_lru_.size() > kTableCacheEntries) {
    table_map_.erase(table_lru_.back().first);
    table_lru_.pop_back();
  }
  return tables;
}

// Caller holds mu_.
TreeReader::EventsPtr TreeReader::events_for(const Located& at) const {
  std::uint64_t key = cache_key(at.branch_ordinal, at.basket_ordinal);
  if (cache_entries_ > 0) {
    if (auto it = basket_map_.find(key); it != basket_map_.end()) {
      basket_lru_.splice(basket_lru_.begin(), basket_lru_, it->second);
      return it->second->second;
    }
  }
  const BasketLocator& loc = *at.locator;
  Bytes image = in_.read_at(loc.file_offset,
                            static_cast<std::size_t>(loc.image_size()));
  BasketRecord record = decode_basket(image);
  {
    ByteCursor cursor(image, ErrorCode::CorruptFrame);
    fetch_header_checked(loc, cursor);
  }
  auto events =
      std::make_shared<std::vector<Bytes>>(unpack_all(record, nullptr));
  stats_.baskets_fetched += 1;
  stats_.bytes_fetched += image.size();
  stats_.bytes_decompressed += record.header.uncompressed_len;

  if (cache_entries_ > 0) {
    basket_lru_.emplace_front(key, events);
    basket_map_[key] = basket_lru_.begin();
    while (basket_lru_.size() > cache_entries_) {
      basket_map_.erase(basket_lru_.back().first);
      basket_lru_.pop_back();
    }
  }
  return events;
}

// Caller holds mu_.
Bytes TreeReader::read_event_frame(const Located& at) const {
  const BasketLocator& loc = *at.locator;
  TablesPtr tables = tables_for(at);
  std::uint32_t begin = tables->comp_offsets[at.local_index];
  std::uint32_t end = tables->comp_offsets[at.local_index + 1];
  std::uint64_t payload_base = loc.file_offset + kBasketHeaderSize +
                               basket_tables_size(loc.flags, loc.event_count);
  Bytes frame = in_.read_at(payload_base + begin, end - begin);
  stats_.frames_fetched += 1;
  stats_.bytes_fetched += end - begin;
  Bytes out = decompress(loc.codec, frame, tables->uncomp_lens[at.local_index]);
  stats_.bytes_decompressed += out.size();
  return out;
}

Bytes TreeReader::read_event(std::string_view branch, std::uint64_t index) const {
  Located at = locate(branch, index);
  std::lock_guard<std::mutex> lock(mu_);
  if (at.locator->flags & kBasketFlagEventFrames) return read_event_frame(at);
  EventsPtr events = events_for(at);
  return (*events)[at.local_index];
}

void TreeReader::scan(std::string_view branch, std::uint64_t stride,
                      const std::function<void(std::uint64_t, const Bytes&)>& fn)
    const {
  if (stride == 0) raise(ErrorCode::UsageError, "stride must be at least 1");
  std::uint64_t total = event_count(branch);
  for (std::uint64_t i = 0; i < total; i += stride) fn(i, read_event(branch, i));
}

TreeReader::EventLocation TreeReader::event_location(std::string_view branch,
                                                     std::uint64_t index) const {
  Located at = locate(branch, index);
  const BasketLocator& loc = *at.locator;
  if (loc.codec.algorithm != Algorithm::Identity ||
      (loc.flags & kBasketFlagEventFrames))
    raise(ErrorCode::UsageError,
          "event byte ranges exist only for verbatim-stored baskets");
  std::uint64_t payload_base = loc.file_offset + kBasketHeaderSize +
                               basket_tables_size(loc.flags, loc.event_count);
  if (loc.flags & kBasketFlagUniformLength) {
    std::uint64_t len = loc.compressed_len / loc.event_count;
    return EventLocation{payload_base + at.local_index * len, len};
  }
  Bytes table = in_.read_at(loc.file_offset + kBasketHeaderSize,
                            std::size_t(4) * loc.event_count);
  std::uint64_t prefix = 0;
  std::uint64_t total = 0;
  std::uint32_t len = 0;
  for (std::uint32_t i = 0; i < loc.event_count; ++i) {
    std::uint32_t v = load_u32(table.data() + std::size_t(4) * i);
    if (i < at.local_index) prefix += v;
    if (i == at.local_index) len = v;
    total += v;
  }
  if (total != loc.compressed_len)
    raise(ErrorCode::CorruptFrame, "event lengths do not sum to payload length");
  return EventLocation{payload_base + prefix, len};
}

ReadStats TreeReader::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return stats_;
}

void TreeReader::reset_stats() {
  std::lock_guard<std::mutex> lock(mu_);
  stats_ = ReadStats{};
}

void TreeReader::clear_cache() {
  std::lock_guard<std::mutex> lock(mu_);
  basket_lru_.clear();
  basket_map_.clear();
  table_lru_.clear();
  table_map_.clear();
}

void TreeReader::set_cache_entries(std::size_t n) {
  std::lock_guard<std::mutex> lock(mu_);
  cache_entries_ = n;
  while (basket_lru_.size() > cache_entries_) {
    basket_map_.erase(basket_lru_.back().first);
    basket_lru_.pop_back();
  }
}

}  // namespace rcf
