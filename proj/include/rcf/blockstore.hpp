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
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rcf/codec.hpp"
#include "rcf/io.hpp"

namespace rcf {

// Layout-blind external compression: the input file is cut into fixed-size
// blocks, each compressed as an independent frame.
//
//   header   magic "BPK1", version u16, codec u8, level u8, block_size u32,
//            original_len u64
//   blocks   one frame per block, back to back; final block may be short
//   index    comp_len u32 per block (offsets follow by prefix sum)
//   trailer  entry count u32, index_offset u64, magic "BPK1"
//
// Little-endian throughout. Structural damage of any kind surfaces as
// CorruptFrame when the file is opened or read.

inline constexpr char kBlockMagic[4] = {'B', 'P', 'K', '1'};
inline constexpr std::uint16_t kBlockVersion = 1;
inline constexpr std::size_t kBlockHeaderSize = 20;
inline constexpr std::size_t kBlockTrailerSize = 16;
inline constexpr std::uint32_t kMinBlockSize = 4096;
inline constexpr std::uint32_t kMaxBlockSize = 1048576;

/// Raises InvalidBlockSize unless block_size is a power of two in
/// [kMinBlockSize, kMaxBlockSize].
void validate_block_size(std::uint32_t block_size);

struct BlockIndex {
  std::uint32_t block_size = 0;
  std::uint64_t original_len = 0;
  CodecSpec codec;

  struct Entry {
    std::uint64_t file_offset = 0;
    std::uint32_t comp_len = 0;
  };
  std::vector<Entry> entries;

  std::uint64_t block_count() const { return entries.size(); }

  /// Uncompressed length of block b (block_size except the final block).
  std::uint64_t block_raw_len(std::uint64_t b) const {
    std::uint64_t start = b * block_size;
    std::uint64_t rest = original_len - start;
    return rest < block_size ? rest : block_size;
  }
};

BlockIndex pack_file(const std::string& input, const std::string& output,
                     std::uint32_t block_size, const CodecSpec& spec,
                     CodecCounters* counters = nullptr);

struct FetchStats {
  std::uint64_t blocks_fetched = 0;
  std::uint64_t bytes_fetched_compressed = 0;
  std::uint64_t bytes_decompressed = 0;
};

/// Serves byte-range reads against a packed file through a two-level cache
/// model: a compressed-fetch set (a block already fetched this session is
/// not fetched again) and an uncompressed-block cache (a cached block is
/// not decompressed again). clear_caches() returns the session to a fully
/// cold state. Thread-safe; stats totals exact under concurrency.
class BlockReader {
 public:
  explicit BlockReader(const std::string& path);
  BlockReader(const BlockReader&) = delete;
  BlockReader& operator=(const BlockReader&) = delete;

  const BlockIndex& index() const { return index_; }
  std::uint64_t original_len() const { return index_.original_len; }
  std::uint64_t packed_size() const { return in_.size(); }

  /// Bytes [offset, offset + len) of the original file. Touches exactly
  /// the blocks overlapping the range.
  Bytes read_range(std::uint64_t offset, std::uint64_t len);

  /// Streams every block to `output`, bypassing caches and stats.
  void unpack_to(const std::string& output);

  FetchStats stats() const;
  void reset_stats();
  void clear_caches();
  /// Disabling also drops currently cached blocks.
  void set_uncompressed_cache(bool enabled);

 private:
  // Caller holds mu_. Returns a pointer into the cache or to scratch.
  const Bytes* block_data(std::uint64_t b, Bytes& scratch);

  FileReader in_;
  BlockIndex index_;

  mutable std::mutex mu_;
  FetchStats stats_;
  bool uncomp_cache_enabled_ = true;
  std::unordered_set<std::uint64_t> fetched_;
  std::unordered_map<std::uint64_t, Bytes> uncomp_cache_;
};

}  // namespace rcf
