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

#include <vector>

#include "rcf/basket.hpp"

namespace rcf {

// Basket construction.  Plain baskets compress the concatenation of all
// events as one frame; per-event baskets compress each event separately so
// a reader can decode one event without touching the rest.  Empty events
// are rejected with EmptyPayload, events whose size does not fit a u32 with
// RangeOutOfBounds.

BasketRecord pack_plain_basket(const std::vector<Bytes>& events,
                               const CodecSpec& spec,
                               std::uint64_t first_event_index = 0,
                               CodecCounters* counters = nullptr);

BasketRecord pack_event_frames_basket(const std::vector<Bytes>& events,
                                      const CodecSpec& spec,
                                      std::uint64_t first_event_index = 0,
                                      CodecCounters* counters = nullptr);

// Decodes event i.  A plain basket costs one whole-payload decompression
// per call; a per-event basket decodes only frame i.
Bytes unpack_event(const BasketRecord& record, std::uint32_t i,
                   CodecCounters* counters = nullptr);

// Decodes every event.  Plain baskets decompress the payload exactly once.
std::vector<Bytes> unpack_all(const BasketRecord& record,
                              CodecCounters* counters = nullptr);

// Bytes a reader must pull from storage to decode event i alone: header and
// tables plus either frame i (per-event) or the whole payload (plain).
std::uint64_t access_cost_bytes(const BasketRecord& record, std::uint32_t i);

}  // namespace rcf
