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

#include "rcf/synthgen.hpp"

#include <bit>
#include <cmath>

namespace rcf {

namespace {

constexpr std::size_t kValuePeriod = 6;

// Distinct seed streams per kind so a corpus never reuses values between
// branches built from one seed.
std::uint64_t seed_for(EventKind kind, std::uint64_t seed) {
  return seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(kind) + 1));
}

void put_float(std::uint8_t* out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  out[0] = static_cast<std::uint8_t>(bits);
  out[1] = static_cast<std::uint8_t>(bits >> 8);
  out[2] = static_cast<std::uint8_t>(bits >> 16);
  out[3] = static_cast<std::uint8_t>(bits >> 24);
}

}  // namespace

const char* kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::TFloat: return "tfloat";
    case EventKind::TSmall: return "tsmall";
    case EventKind::TLarge: return "tlarge";
  }
  return "unknown";
}

EventKind parse_kind(std::string_view name) {
  if (name == "tfloat") return EventKind::TFloat;
  if (name == "tsmall") return EventKind::TSmall;
  if (name == "tlarge") return EventKind::TLarge;
  raise(ErrorCode::UsageError, "unknown event kind '" + std::string(name) + "'");
}

EventGenerator::EventGenerator(EventKind kind, std::uint64_t seed)
    : kind_(kind), rng_(seed_for(kind, seed)) {}

void EventGenerator::fill(std::uint8_t* out) {
  std::size_t slots = event_size(kind_) / 4;
  float value = 0.0f;
  for (std::size_t slot = 0; slot < slots; ++slot) {
    if (slot % kValuePeriod == 0)
      value = static_cast<float>(rng_() >> 40) * 0x1p-24f;
    put_float(out + 4 * slot, value);
  }
}

Bytes EventGenerator::next() {
  Bytes out(event_size(kind_));
  fill(out.data());
  return out;
}

std::vector<Bytes> generate(const GenSpec& spec) {
  if (spec.count == 0) raise(ErrorCode::UsageError, "event count must be >= 1");
  EventGenerator gen(spec.kind, spec.seed);
  std::vector<Bytes> events;
  events.reserve(spec.count);
  for (std::uint64_t i = 0; i < spec.count; ++i) events.push_back(gen.next());
  return events;
}

std::uint64_t CorpusPlan::count(EventKind kind) const {
  switch (kind) {
    case EventKind::TFloat: return tfloat_count;
    case EventKind::TSmall: return tsmall_count;
    case EventKind::TLarge: return tlarge_count;
  }
  return 0;
}

std::uint64_t CorpusPlan::total_bytes() const {
  std::uint64_t total = 0;
  for (EventKind kind : kAllKinds) total += count(kind) * event_size(kind);
  return total;
}

CorpusPlan plan_corpus(std::uint64_t total_bytes, const CorpusMix& mix) {
  if (total_bytes < (1ull << 20))
    raise(ErrorCode::UsageError, "corpus must be at least 1 MiB");
  double weights[3] = {mix.tfloat, mix.tsmall, mix.tlarge};
  double weight_sum = 0;
  for (double w : weights) {
    if (w < 0 || !std::isfinite(w))
      raise(ErrorCode::UsageError, "mix weights must be finite and >= 0");
    weight_sum += w;
  }
  if (weight_sum <= 0) raise(ErrorCode::UsageError, "mix weights sum to zero");

  CorpusPlan plan;
  std::uint64_t* counts[3] = {&plan.tfloat_count, &plan.tsmall_count,
                              &plan.tlarge_count};
  for (EventKind kind : kAllKinds) {
    std::size_t k = static_cast<std::size_t>(kind);
    double target = static_cast<double>(total_bytes) * weights[k] / weight_sum;
    if (target == 0) continue;  // kind excluded from the mix
    std::uint64_t count = static_cast<std::uint64_t>(
        std::llround(target / static_cast<double>(event_size(kind))));
    double achieved = static_cast<double>(count) *
                      static_cast<double>(event_size(kind));
    if (std::fabs(achieved - target) > 0.05 * target)
      raise(ErrorCode::InvalidMix,
            std::string(kind_name(kind)) + " share " + std::to_string(target) +
                " bytes is not achievable within 5% (event size " +
                std::to_string(event_size(kind)) + ")");
    *counts[k] = count;
  }
  return plan;
}

std::uint64_t Corpus::total_bytes() const {
  std::uint64_t total = 0;
  for (const CorpusBranch& b : branches) total += b.bytes();
  return total;
}

Corpus make_corpus(const CorpusPlan& plan, std::uint64_t seed) {
  Corpus corpus;
  for (EventKind kind : kAllKinds) {
    CorpusBranch& branch = corpus.branches[static_cast<std::size_t>(kind)];
    branch.kind = kind;
    branch.count = plan.count(kind);
    branch.data.resize(branch.count * event_size(kind));
    EventGenerator gen(kind, seed);
    for (std::uint64_t i = 0; i < branch.count; ++i)
      gen.fill(branch.data.data() + i * event_size(kind));
  }
  return corpus;
}

}  // namespace rcf
