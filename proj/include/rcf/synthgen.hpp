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
#include <random>
#include <string_view>
#include <vector>

#include "rcf/bytes.hpp"

namespace rcf {

// Three synthetic event shapes built from 4-byte IEEE-754 floats with a
// period-6 value pattern: a fresh uniform [0, 1) value fills 6 consecutive
// slots, so bytes repeat at distance <= 24 and look random beyond it.
//
//   TFloat   6 slots, one value      24 bytes
//   TSmall   1000 slots              4000 bytes (final group is 4 slots)
//   TLarge   1,000,000 slots         4,000,000 bytes
//
// Streams are deterministic functions of (kind, seed); the generator is
// mt19937_64 and every byte layout is little-endian, so identical GenSpecs
// produce identical bytes on any platform.

enum class EventKind : std::uint8_t { TFloat = 0, TSmall = 1, TLarge = 2 };

inline constexpr EventKind kAllKinds[] = {EventKind::TFloat, EventKind::TSmall,
                                          EventKind::TLarge};

constexpr std::size_t event_size(EventKind kind) {
  switch (kind) {
    case EventKind::TFloat: return 24;
    case EventKind::TSmall: return 4000;
    case EventKind::TLarge: return 4000000;
  }
  return 0;
}

const char* kind_name(EventKind kind);
EventKind parse_kind(std::string_view name);  // UsageError on unknown

struct GenSpec {
  EventKind kind = EventKind::TFloat;
  std::uint64_t seed = 0;
  std::uint64_t count = 1;
};

class EventGenerator {
 public:
  EventGenerator(EventKind kind, std::uint64_t seed);

  /// Writes the next event's event_size(kind) bytes at `out`.
  void fill(std::uint8_t* out);
  Bytes next();

 private:
  EventKind kind_;
  std::mt19937_64 rng_;
};

/// spec.count events in stream order.
std::vector<Bytes> generate(const GenSpec& spec);

/// Relative byte share per kind; equal thirds by default.
struct CorpusMix {
  double tfloat = 1.0;
  double tsmall = 1.0;
  double tlarge = 1.0;
};

struct CorpusPlan {
  std::uint64_t tfloat_count = 0;
  std::uint64_t tsmall_count = 0;
  std::uint64_t tlarge_count = 0;

  std::uint64_t count(EventKind kind) const;
  std::uint64_t total_bytes() const;
};

/// Event counts that realize the mix over total_bytes. Each kind's raw
/// bytes must land within 5% of its target share; TLarge's 4 MB quantum
/// makes small corpora infeasible, which surfaces as InvalidMix.
CorpusPlan plan_corpus(std::uint64_t total_bytes, const CorpusMix& mix = {});

/// One branch of generated events, stored contiguously.
struct CorpusBranch {
  EventKind kind = EventKind::TFloat;
  std::uint64_t count = 0;
  Bytes data;

  std::size_t event_len() const { return event_size(kind); }
  std::uint64_t bytes() const { return data.size(); }
  ByteSpan event(std::uint64_t i) const {
    return ByteSpan(data.data() + i * event_len(), event_len());
  }
};

struct Corpus {
  CorpusBranch branches[3];  // indexed by EventKind

  const CorpusBranch& branch(EventKind kind) const {
    return branches[static_cast<std::size_t>(kind)];
  }
  std::uint64_t total_bytes() const;
};

Corpus make_corpus(const CorpusPlan& plan, std::uint64_t seed);

}  // namespace rcf
