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

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rcf/bytes.hpp"

namespace rcf {

/// Wire identifiers, single byte in every file header.
enum class Algorithm : std::uint8_t {
  Identity = 0,
  Deflate = 1,
  Lzma = 2,
  Lz4 = 3,
  Lz4Hc = 4,
};

const char* algorithm_name(Algorithm a);

/// Names a compression format plus a level, not a particular library.
/// Deflate and Lzma accept levels 1..9 (level 0 / "store" is Identity),
/// Lz4Hc accepts 4..9, Lz4 ignores its level, Identity is fixed at 0.
struct CodecSpec {
  Algorithm algorithm = Algorithm::Identity;
  std::uint8_t level = 0;

  static CodecSpec identity() { return {Algorithm::Identity, 0}; }
  static CodecSpec deflate(int level = 6);
  static CodecSpec lzma(int level = 5);
  static CodecSpec lz4() { return {Algorithm::Lz4, 0}; }
  static CodecSpec lz4hc(int level = 9);

  /// Throws UnsupportedLevel when the level is outside the algorithm's range.
  void validate() const;

  /// "identity", "deflate-6", "lz4", "lz4hc-9", ...
  std::string name() const;

  /// Inverse of name(); also accepts a bare algorithm name with the
  /// default level. Throws UsageError / UnsupportedLevel.
  static CodecSpec parse(std::string_view name);

  friend bool operator==(const CodecSpec&, const CodecSpec&) = default;
};

/// Decodes the (algorithm byte, level byte) wire pair. `on_bad` is thrown
/// for unknown algorithm ids or invalid levels.
CodecSpec decode_codec_pair(std::uint8_t algorithm, std::uint8_t level,
                            ErrorCode on_bad);

/// Byte and CPU-time accounting for one session. Totals are exact under
/// concurrent use; interleaving is unspecified.
class CodecCounters {
 public:
  void add(std::uint64_t in, std::uint64_t out, std::uint64_t nanos) {
    bytes_in_.fetch_add(in, std::memory_order_relaxed);
    bytes_out_.fetch_add(out, std::memory_order_relaxed);
    calls_.fetch_add(1, std::memory_order_relaxed);
    cpu_nanos_.fetch_add(nanos, std::memory_order_relaxed);
  }

  std::uint64_t bytes_in() const { return bytes_in_.load(std::memory_order_relaxed); }
  std::uint64_t bytes_out() const { return bytes_out_.load(std::memory_order_relaxed); }
  std::uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }
  std::uint64_t cpu_nanos() const { return cpu_nanos_.load(std::memory_order_relaxed); }

  /// bytes_in / bytes_out; defined only when bytes_out > 0.
  double ratio() const;

  void reset() {
    bytes_in_ = 0;
    bytes_out_ = 0;
    calls_ = 0;
    cpu_nanos_ = 0;
  }

 private:
  std::atomic<std::uint64_t> bytes_in_{0};
  std::atomic<std::uint64_t> bytes_out_{0};
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> cpu_nanos_{0};
};

/// Compresses `data` into one self-contained frame of the requested
/// algorithm. Identity returns the input unchanged. Deterministic for a
/// fixed (spec, data) pair within a process.
Bytes compress(const CodecSpec& spec, ByteSpan data,
               CodecCounters* counters = nullptr);

/// Decompresses a frame produced by compress() with a compatible spec.
/// The original length is carried externally and validated: a clean frame
/// whose output differs from expected_len is a LengthMismatch, anything
/// malformed (truncation, checksum failure, trailing bytes) a CorruptFrame.
Bytes decompress(const CodecSpec& spec, ByteSpan frame,
                 std::uint64_t expected_len, CodecCounters* counters = nullptr);

struct CodecInfo {
  CodecSpec spec;  // representative spec at the default level
  std::string name;
  std::uint8_t min_level = 0;
  std::uint8_t max_level = 0;
};

/// Identity, Deflate, Lzma, Lz4, Lz4Hc with their advertised level ranges.
std::vector<CodecInfo> list_codecs();

}  // namespace rcf
