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
#include <string>
#include <string_view>
#include <vector>

#include "rcf/codec.hpp"
#include "rcf/container.hpp"

namespace rcf {

/// Knobs shared by the three experiments. Unset list fields fall back to
/// the defaults below; work_dir must name an existing writable directory
/// for the experiments that stage files (rac, blockstore).
struct BenchConfig {
  std::uint64_t corpus_bytes = 192ull << 20;
  std::uint64_t seed = 42;
  int reps = 3;  // timing runs use the median of this many repetitions
  std::string work_dir;
  std::vector<CodecSpec> codec_matrix;
  std::uint64_t container_capacity = kDefaultBasketCapacity;
  std::uint64_t random_k = 1000;
  std::vector<std::uint32_t> granule_sizes;
  std::vector<std::uint64_t> strides;

  /// Raises UsageError on out-of-range knobs (reps < 3, zero strides or
  /// random_k, undersized capacity); granules outside the power-of-two
  /// 4 KiB..1 MiB range raise InvalidBlockSize.
  void validate() const;
};

std::vector<CodecSpec> default_codec_matrix();
std::vector<std::uint32_t> default_granule_sizes();
std::vector<std::uint64_t> default_strides();

/// One measurement. `size` is the raw byte count the row's operation
/// covers, so ratio = size / compressed_size whenever compressed_size is
/// nonzero. Granularity, mode and repetition count ride in config_id as
/// pipe-separated key=value pairs; none of the string fields may contain
/// commas or newlines.
struct BenchRow {
  std::string config_id;
  std::string codec;
  std::uint64_t size = 0;
  std::string workload;
  std::string cache_mode;  // "cold", "hot" or "none"
  double real_time = 0;    // seconds, median over repetitions
  double cpu_time = 0;     // seconds, median over repetitions
  std::uint64_t compressed_size = 0;
  double ratio = 0;
  std::uint64_t bytes_fetched = 0;
  std::uint64_t bytes_decompressed = 0;
  std::uint64_t blocks_or_baskets_touched = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Whole-corpus compress/decompress matrix: two rows per codec.
BenchReport bench_codecs(const BenchConfig& config);

/// Container with and without per-event frames: write rows, per-branch
/// ratio rows, random and sequential read rows under cold and hot caches.
BenchReport bench_rac(const BenchConfig& config);

/// Container versus blockstore at matched granularity: pack-ratio rows and
/// strided-read rows per granule and side.
BenchReport bench_blockstore(const BenchConfig& config);

/// CSV with a fixed header; emit -> parse -> emit is a byte-level fixed
/// point (doubles use shortest round-trip formatting).
std::string emit_csv(const BenchReport& report);
BenchReport parse_csv(std::string_view text);

/// Human-readable aligned columns; not machine-parsed.
std::string emit_table(const BenchReport& report);

/// Applies `key = value` lines from [bench], [codecs], [rac] and
/// [blockstore] sections over `config`. Unknown sections or keys raise
/// UsageError naming the line.
void load_config_file(const std::string& path, BenchConfig& config);

/// k distinct indices drawn from [0, population) by seeded partial
/// shuffle; k is clamped to the population size. Deterministic.
std::vector<std::uint32_t> sample_indices(std::uint64_t population,
                                          std::uint64_t k, std::uint64_t seed);

}  // namespace rcf
