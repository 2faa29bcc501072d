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
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rcf/basket.hpp"
#include "rcf/io.hpp"

namespace rcf {

// Columnar event file: trees of branches, branches of baskets.
//
//   header   magic "RCF1", format_version u16, reserved u16
//   data     basket images, back to back (layout in basket.hpp)
//   footer   branch count u32, then per branch: name length u16 + UTF-8
//            name, locator count u32, locators (file_offset u64,
//            compressed_len u64, event_count u32, first_event_index u64,
//            codec u8, level u8, flags u8, pad u8)
//   trailer  footer_offset u64, magic "RCF1"
//
// All integers little-endian. compressed_len counts payload bytes only;
// the image size follows from event_count and flags.

inline constexpr char kContainerMagic[4] = {'R', 'C', 'F', '1'};
inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 8;
inline constexpr std::size_t kContainerTrailerSize = 12;
inline constexpr std::uint64_t kDefaultBasketCapacity = 65536;
inline constexpr std::uint64_t kMinBasketCapacity = 4096;

struct BasketLocator {
  std::uint64_t file_offset = 0;
  std::uint64_t compressed_len = 0;  // payload bytes only
  std::uint32_t event_count = 0;
  std::uint64_t first_event_index = 0;
  CodecSpec codec;
  std::uint8_t flags = 0;

  std::uint64_t image_size() const {
    return kBasketHeaderSize + basket_tables_size(flags, event_count) +
           compressed_len;
  }
  std::uint64_t end_event_index() const {
    return first_event_index + event_count;
  }
};

struct BranchIndex {
  std::string name;
  std::vector<BasketLocator> locators;

  std::uint64_t event_count() const {
    return locators.empty() ? 0 : locators.back().end_event_index();
  }
  // Total on-disk bytes of this branch's basket images.
  std::uint64_t stored_bytes() const;
};

struct TreeIndex {
  std::vector<BranchIndex> branches;

  const BranchIndex* find(std::string_view name) const;
  // Raises IndexOutOfRange for an unknown branch name.
  const BranchIndex& at(std::string_view name) const;
};

// Canonical footer serialization; finalize() persists exactly these bytes.
Bytes encode_footer(const TreeIndex& index);
TreeIndex decode_footer(ByteSpan footer);

/// Single-pass writer. Events append into per-branch buffers; a buffer
/// holding >= basket_capacity bytes is sealed into one basket immediately,
/// so an oversized event becomes a basket of its own. finalize() seals the
/// partial buffers and writes footer + trailer. Single-threaded use.
class TreeWriter {
 public:
  TreeWriter(const std::string& path, std::uint64_t basket_capacity,
             const CodecSpec& codec, bool event_frames);
  TreeWriter(const TreeWriter&) = delete;
  TreeWriter& operator=(const TreeWriter&) = delete;

  /// Branches are created on first use, in append order.
  void append(std::string_view branch, ByteSpan payload);

  /// Returns the index exactly as persisted. The writer is closed
  /// afterwards; further append/finalize calls raise WriterClosed.
  TreeIndex finalize();

  /// Compression-side byte and CPU accounting for this writer.
  CodecCounters& counters() { return counters_; }

 private:
  struct OpenBranch {
    std::string name;
    std::vector<Bytes> buffer;
    std::uint64_t buffered_bytes = 0;
    std::uint64_t next_event_index = 0;
    std::vector<BasketLocator> locators;
  };

  void seal(OpenBranch& branch);

  // Capacity and codec are validated before out_ creates the file.
  std::uint64_t capacity_;
  CodecSpec codec_;
  bool event_frames_;
  FileWriter out_;
  bool open_ = true;
  std::vector<OpenBranch> branches_;
  std::unordered_map<std::string, std::size_t> branch_ordinals_;
  CodecCounters counters_;
};

/// Byte accounting for one reader session. "Fetched" counts file bytes
/// read for event data: whole images for plain baskets, header + tables +
/// the requested frame for per-event-frame baskets. Cache hits fetch and
/// decompress nothing.
struct ReadStats {
  std::uint64_t baskets_fetched = 0;  // images or table blocks pulled
  std::uint64_t frames_fetched = 0;   // individual event frames pulled
  std::uint64_t bytes_fetched = 0;
  std::uint64_t bytes_decompressed = 0;
};

/// Random-access reader. Thread-safe: concurrent read_event/scan calls are
/// serialized around the shared caches, and stats totals stay exact.
///
/// Plain baskets decompress whole and land in a decompressed-basket cache
/// (entry count configurable, default 1, 0 disables) modeling a user-space
/// reader that re-decompresses on every miss. Per-event-frame baskets
/// bypass that cache entirely: each read decompresses exactly one frame.
class TreeReader {
 public:
  explicit TreeReader(const std::string& path, std::size_t cache_entries = 1);
  TreeReader(const TreeReader&) = delete;
  TreeReader& operator=(const TreeReader&) = delete;

  const TreeIndex& index() const { return index_; }
  std::uint64_t file_size() const { return in_.size(); }
  std::uint64_t event_count(std::string_view branch) const;

  Bytes read_event(std::string_view branch, std::uint64_t index) const;

  /// Visits events at indices 0, stride, 2*stride, ... in order.
  void scan(std::string_view branch, std::uint64_t stride,
            const std::function<void(std::uint64_t, const Bytes&)>& fn) const;

  /// Byte range of one event inside this file. Only meaningful when the
  /// holding basket stores events verbatim (identity codec, no per-event
  /// frames); anything else raises UsageError.
  struct EventLocation {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
  };
  EventLocation event_location(std::string_view branch, std::uint64_t index) const;

  ReadStats stats() const;
  void reset_stats();
  /// Drops both the decompressed-basket cache and the table cache.
  void clear_cache();
  void set_cache_entries(std::size_t n);

 private:
  struct Located {
    std::size_t branch_ordinal;
    const BasketLocator* locator;
    std::size_t basket_ordinal;
    std::uint32_t local_index;
  };
  struct CachedTables {
    std::vector<std::uint32_t> comp_offsets;
    std::vector<std::uint32_t> uncomp_lens;
  };
  using EventsPtr = std::shared_ptr<const std::vector<Bytes>>;
  using TablesPtr = std::shared_ptr<const CachedTables>;

  Located locate(std::string_view branch, std::uint64_t index) const;
  BasketHeader fetch_header_checked(const BasketLocator& loc,
                                    ByteCursor& cursor) const;
  TablesPtr tables_for(const Located& at) const;
  EventsPtr events_for(const Located& at) const;
  Bytes read_event_frame(const Located& at) const;

  FileReader in_;
  TreeIndex index_;
  std::uint64_t data_end_ = 0;

  mutable std::mutex mu_;
  mutable ReadStats stats_;
  mutable std::size_t cache_entries_;
  mutable std::list<std::pair<std::uint64_t, EventsPtr>> basket_lru_;
  mutable std::unordered_map<std::uint64_t, decltype(basket_lru_)::iterator>
      basket_map_;
  mutable std::list<std::pair<std::uint64_t, TablesPtr>> table_lru_;
  mutable std::unordered_map<std::uint64_t, decltype(table_lru_)::iterator>
      table_map_;
};

}  // namespace rcf
