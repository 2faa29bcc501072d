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

#include "rcf/blockstore.hpp"

#include <cstring>

namespace rcf {

void validate_block_size(std::uint32_t block_size) {
  bool power_of_two = block_size != 0 && (block_size & (block_size - 1)) == 0;
  if (!power_of_two || block_size < kMinBlockSize || block_size > kMaxBlockSize)
    raise(ErrorCode::InvalidBlockSize,
          "block size must be a power of two in [" +
              std::to_string(kMinBlockSize) + ", " +
              std::to_string(kMaxBlockSize) + "], got " +
              std::to_string(block_size));
}

BlockIndex pack_file(const std::string& input, const std::string& output,
                     std::uint32_t block_size, const CodecSpec& spec,
                     CodecCounters* counters) {
  validate_block_size(block_size);
  spec.validate();
  FileReader in(input);

  BlockIndex index;
  index.block_size = block_size;
  index.original_len = in.size();
  index.codec = spec;

  FileWriter out(output);
  Bytes header;
  header.insert(header.end(), kBlockMagic, kBlockMagic + 4);
  put_u16(header, kBlockVersion);
  put_u8(header, static_cast<std::uint8_t>(spec.algorithm));
  put_u8(header, spec.level);
  put_u32(header, block_size);
  put_u64(header, index.original_len);
  out.write(header);

  std::uint64_t block_count =
      (index.original_len + block_size - 1) / block_size;
  index.entries.reserve(block_count);
  Bytes raw(block_size);
  for (std::uint64_t b = 0; b < block_count; ++b) {
    std::size_t raw_len = static_cast<std::size_t>(index.block_raw_len(b));
    in.read_at(b * std::uint64_t(block_size), raw.data(), raw_len);
    Bytes frame = compress(spec, ByteSpan(raw.data(), raw_len), counters);
    BlockIndex::Entry entry;
    entry.file_offset = out.offset();
    entry.comp_len = static_cast<std::uint32_t>(frame.size());
    out.write(frame);
    index.entries.push_back(entry);
  }

  std::uint64_t index_offset = out.offset();
  Bytes tail;
  tail.reserve(4 * index.entries.size() + kBlockTrailerSize);
  for (const BlockIndex::Entry& entry : index.entries)
    put_u32(tail, entry.comp_len);
  put_u32(tail, static_cast<std::uint32_t>(block_count));
  put_u64(tail, index_offset);
  tail.insert(tail.end(), kBlockMagic, kBlockMagic + 4);
  out.write(tail);
  out.close();
  return index;
}

BlockReader::BlockReader(const std::string& path) : in_(path) {
  if (in_.size() < kBlockHeaderSize + kBlockTrailerSize)
    raise(ErrorCode::CorruptFrame, "file too short for header and trailer");
  Bytes head = in_.read_at(0, kBlockHeaderSize);
  if (std::memcmp(head.data(), kBlockMagic, 4) != 0)
    raise(ErrorCode::CorruptFrame, "bad magic");
  if (load_u16(head.data() + 4) != kBlockVersion)
    raise(ErrorCode::CorruptFrame, "unsupported format version");
  index_.codec =
      decode_codec_pair(head[6], head[7], ErrorCode::CorruptFrame);
  index_.block_size = load_u32(head.data() + 8);
  index_.original_len = load_u64(head.data() + 12);
  bool power_of_two = index_.block_size != 0 &&
                      (index_.block_size & (index_.block_size - 1)) == 0;
  if (!power_of_two || index_.block_size < kMinBlockSize ||
      index_.block_size > kMaxBlockSize)
    raise(ErrorCode::CorruptFrame, "invalid stored block size");

  Bytes trailer =
      in_.read_at(in_.size() - kBlockTrailerSize, kBlockTrailerSize);
  if (std::memcmp(trailer.data() + 12, kBlockMagic, 4) != 0)
    raise(ErrorCode::CorruptFrame, "bad trailer magic");
  std::uint64_t block_count = load_u32(trailer.data());
  std::uint64_t index_offset = load_u64(trailer.data() + 4);

  std::uint64_t expected_count =
      (index_.original_len + index_.block_size - 1) / index_.block_size;
  if (block_count != expected_count)
    raise(ErrorCode::CorruptFrame, "entry count disagrees with original length");
  if (index_offset < kBlockHeaderSize ||
      index_offset + 4 * block_count + kBlockTrailerSize != in_.size())
    raise(ErrorCode::CorruptFrame, "index region does not fit the file");

  Bytes lens = in_.read_at(index_offset, static_cast<std::size_t>(4 * block_count));
  index_.entries.resize(block_count);
  std::uint64_t offset = kBlockHeaderSize;
  for (std::uint64_t b = 0; b < block_count; ++b) {
    std::uint32_t comp_len = load_u32(lens.data() + 4 * b);
    if (comp_len == 0) raise(ErrorCode::CorruptFrame, "zero-length block entry");
    index_.entries[b] = {offset, comp_len};
    offset += comp_len;
  }
  if (offset != index_offset)
    raise(ErrorCode::CorruptFrame, "blocks do not tile the data region");
}

const Bytes* BlockReader::block_data(std::uint64_t b, Bytes& scratch) {
  if (uncomp_cache_enabled_) {
    if (auto it = uncomp_cache_.find(b); it != uncomp_cache_.end())
      return &it->second;
  }
  const BlockIndex::Entry& entry = index_.entries[b];
  if (fetched_.insert(b).second) {
    stats_.blocks_fetched += 1;
    stats_.bytes_fetched_compressed += entry.comp_len;
  }
  Bytes frame = in_.read_at(entry.file_offset, entry.comp_len);
  std::uint64_t raw_len = index_.block_raw_len(b);
  scratch = decompress(index_.codec, frame, raw_len);
  stats_.bytes_decompressed += raw_len;
  if (uncomp_cache_enabled_) {
    auto [it, _] = uncomp_cache_.insert_or_assign(b, std::move(scratch));
    return &it->second;
  }
  return &scratch;
}

Bytes BlockReader::read_range(std::uint64_t offset, std::uint64_t len) {
  if (offset > index_.original_len || len > index_.original_len - offset)
    raise(ErrorCode::RangeOutOfBounds,
          "range [" + std::to_string(offset) + ", +" + std::to_string(len) +
              ") outside original file");
  Bytes out;
  if (len == 0) return out;
  out.reserve(static_cast<std::size_t>(len));

  std::lock_guard<std::mutex> lock(mu_);
  std::uint64_t first = offset / index_.block_size;
  std::uint64_t last = (offset + len - 1) / index_.block_size;
  Bytes scratch;
  for (std::uint64_t b = first; b <= last; ++b) {
    const Bytes* block = block_data(b, scratch);
    std::uint64_t block_start = b * index_.block_size;
    std::uint64_t from = offset > block_start ? offset - block_start : 0;
    std::uint64_t to = offset + len - block_start;
    if (to > block->size()) to = block->size();
    out.insert(out.end(), block->begin() + static_cast<std::size_t>(from),
               block->begin() + static_cast<std::size_t>(to));
  }
  return out;
}

void BlockReader::unpack_to(const std::string& output) {
  FileWriter out(output);
  Bytes frame;
  for (std::uint64_t b = 0; b < index_.block_count(); ++b) {
    const BlockIndex::Entry& entry = index_.entries[b];
    frame = in_.read_at(entry.file_offset, entry.comp_len);
    Bytes raw = decompress(index_.codec, frame, index_.block_raw_len(b));
    out.write(raw);
  }
  out.close();
}

FetchStats BlockReader::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return stats_;
}

void BlockReader::reset_stats() {
  std::lock_guard<std::mutex> lock(mu_);
  stats_ = FetchStats{};
}

void BlockReader::clear_caches() {
  std::lock_guard<std::mutex> lock(mu_);
  fetched_.clear();
  uncomp_cache_.clear();
}

void BlockReader::set_uncompressed_cache(bool enabled) {
  std::lock_guard<std::mutex> lock(mu_);
  uncomp_cache_enabled_ = enabled;
  if (!enabled) uncomp_cache_.clear();
}

}  // namespace rcf
