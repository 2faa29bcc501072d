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

#include "rcf/codec.hpp"

#include <lzma.h>
#include <time.h>
#include <zlib.h>

#include <charconv>
#include <limits>

#include "lz4/lz4frame.h"
#include "lz4/lz4hc.h"

namespace rcf {

namespace {

std::uint64_t thread_cpu_nanos() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<std::uint64_t>(ts.tv_sec) * 1000000000ull +
         static_cast<std::uint64_t>(ts.tv_nsec);
}

class CpuScope {
 public:
  CpuScope(CodecCounters* counters, std::uint64_t in)
      : counters_(counters), in_(in), start_(counters ? thread_cpu_nanos() : 0) {}

  void finish(std::uint64_t out) {
    if (counters_) counters_->add(in_, out, thread_cpu_nanos() - start_);
  }

 private:
  CodecCounters* counters_;
  std::uint64_t in_;
  std::uint64_t start_;
};

// ---- Deflate (zlib stream, RFC 1950) ----

Bytes deflate_compress(int level, ByteSpan data) {
  uLong bound = compressBound(static_cast<uLong>(data.size()));
  Bytes out(bound);
  uLongf out_len = bound;
  int rc = compress2(out.data(), &out_len, data.data(),
                     static_cast<uLong>(data.size()), level);
  if (rc != Z_OK) raise(ErrorCode::CodecUnavailable, "zlib compress2 failed");
  out.resize(out_len);
  return out;
}

Bytes deflate_decompress(ByteSpan frame, std::uint64_t expected_len) {
  Bytes out(expected_len + 1);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK)
    raise(ErrorCode::CodecUnavailable, "zlib inflateInit failed");
  zs.next_in = const_cast<Bytef*>(frame.data());
  zs.avail_in = static_cast<uInt>(frame.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  std::uint64_t produced = zs.total_out;
  std::uint64_t consumed = zs.total_in;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) raise(ErrorCode::CorruptFrame, "zlib stream did not end cleanly");
  if (consumed != frame.size())
    raise(ErrorCode::CorruptFrame, "trailing bytes after zlib stream");
  if (produced != expected_len)
    raise(ErrorCode::LengthMismatch, "zlib output length != expected");
  out.resize(produced);
  return out;
}

// ---- Lzma (.xz container via liblzma) ----

Bytes lzma_compress_frame(int level, ByteSpan data) {
  std::size_t bound = lzma_stream_buffer_bound(data.size());
  Bytes out(bound);
  std::size_t out_pos = 0;
  lzma_ret rc = lzma_easy_buffer_encode(
      static_cast<std::uint32_t>(level), LZMA_CHECK_CRC32, nullptr,
      data.data(), data.size(), out.data(), &out_pos, out.size());
  if (rc != LZMA_OK) raise(ErrorCode::CodecUnavailable, "lzma encode failed");
  out.resize(out_pos);
  return out;
}

Bytes lzma_decompress_frame(ByteSpan frame, std::uint64_t expected_len) {
  Bytes out(expected_len + 1);
  lzma_stream strm = LZMA_STREAM_INIT;
  if (lzma_stream_decoder(&strm, std::numeric_limits<std::uint64_t>::max(), 0) != LZMA_OK)
    raise(ErrorCode::CodecUnavailable, "lzma decoder init failed");
  strm.next_in = frame.data();
  strm.avail_in = frame.size();
  strm.next_out = out.data();
  strm.avail_out = out.size();
  lzma_ret rc = lzma_code(&strm, LZMA_FINISH);
  std::uint64_t produced = strm.total_out;
  std::uint64_t consumed = strm.total_in;
  lzma_end(&strm);
  if (rc != LZMA_STREAM_END) raise(ErrorCode::CorruptFrame, "xz stream did not end cleanly");
  if (consumed != frame.size())
    raise(ErrorCode::CorruptFrame, "trailing bytes after xz stream");
  if (produced != expected_len)
    raise(ErrorCode::LengthMismatch, "xz output length != expected");
  out.resize(produced);
  return out;
}

// ---- Lz4 / Lz4Hc (official LZ4 Frame format) ----

LZ4F_preferences_t lz4_prefs(int level) {
  LZ4F_preferences_t prefs{};
  prefs.compressionLevel = level;
  prefs.frameInfo.contentChecksumFlag = LZ4F_contentChecksumEnabled;
  return prefs;
}

Bytes lz4_compress_frame(int level, ByteSpan data) {
  LZ4F_preferences_t prefs = lz4_prefs(level);
  std::size_t bound = LZ4F_compressFrameBound(data.size(), &prefs);
  Bytes out(bound);
  std::size_t written =
      LZ4F_compressFrame(out.data(), out.size(), data.data(), data.size(), &prefs);
  if (LZ4F_isError(written))
    raise(ErrorCode::CodecUnavailable, LZ4F_getErrorName(written));
  out.resize(written);
  return out;
}

Bytes lz4_decompress_frame(ByteSpan frame, std::uint64_t expected_len) {
  Bytes out(expected_len + 1);
  LZ4F_dctx* dctx = nullptr;
  if (LZ4F_isError(LZ4F_createDecompressionContext(&dctx, LZ4F_VERSION)))
    raise(ErrorCode::CodecUnavailable, "lz4f context alloc failed");
  std::size_t src_pos = 0, dst_pos = 0;
  std::size_t hint = 1;
  while (hint != 0) {
    if (src_pos == frame.size() || dst_pos == out.size()) break;
    std::size_t dst_avail = out.size() - dst_pos;
    std::size_t src_avail = frame.size() - src_pos;
    hint = LZ4F_decompress(dctx, out.data() + dst_pos, &dst_avail,
                           frame.data() + src_pos, &src_avail, nullptr);
    if (LZ4F_isError(hint)) {
      LZ4F_freeDecompressionContext(dctx);
      raise(ErrorCode::CorruptFrame, LZ4F_getErrorName(hint));
    }
    src_pos += src_avail;
    dst_pos += dst_avail;
  }
  LZ4F_freeDecompressionContext(dctx);
  if (hint != 0) raise(ErrorCode::CorruptFrame, "lz4 frame incomplete");
  if (src_pos != frame.size())
    raise(ErrorCode::CorruptFrame, "trailing bytes after lz4 frame");
  if (dst_pos != expected_len)
    raise(ErrorCode::LengthMismatch, "lz4 output length != expected");
  out.resize(dst_pos);
  return out;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Identity: return "identity";
    case Algorithm::Deflate: return "deflate";
    case Algorithm::Lzma: return "lzma";
    case Algorithm::Lz4: return "lz4";
    case Algorithm::Lz4Hc: return "lz4hc";
  }
  return "unknown";
}

CodecSpec CodecSpec::deflate(int level) {
  CodecSpec s{Algorithm::Deflate, static_cast<std::uint8_t>(level)};
  s.validate();
  return s;
}

CodecSpec CodecSpec::lzma(int level) {
  CodecSpec s{Algorithm::Lzma, static_cast<std::uint8_t>(level)};
  s.validate();
  return s;
}

CodecSpec CodecSpec::lz4hc(int level) {
  CodecSpec s{Algorithm::Lz4Hc, static_cast<std::uint8_t>(level)};
  s.validate();
  return s;
}

void CodecSpec::validate() const {
  switch (algorithm) {
    case Algorithm::Identity:
      if (level != 0)
        raise(ErrorCode::UnsupportedLevel, "identity level must be 0");
      return;
    case Algorithm::Deflate:
    case Algorithm::Lzma:
      // Level 0 (store) is represented by Identity, not by the codec.
      if (level < 1 || level > 9)
        raise(ErrorCode::UnsupportedLevel,
              std::string(algorithm_name(algorithm)) + " level must be 1..9");
      return;
    case Algorithm::Lz4:
      return;  // level ignored
    case Algorithm::Lz4Hc:
      if (level < 4 || level > 9)
        raise(ErrorCode::UnsupportedLevel, "lz4hc level must be 4..9");
      return;
  }
  raise(ErrorCode::UnsupportedLevel, "unknown algorithm");
}

std::string CodecSpec::name() const {
  switch (algorithm) {
    case Algorithm::Identity: return "identity";
    case Algorithm::Lz4: return "lz4";
    default:
      return std::string(algorithm_name(algorithm)) + "-" + std::to_string(level);
  }
}

CodecSpec CodecSpec::parse(std::string_view text) {
  std::string_view algo = text;
  int level = -1;
  if (auto dash = text.rfind('-'); dash != std::string_view::npos) {
    std::string_view digits = text.substr(dash + 1);
    int parsed = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), parsed);
    if (ec == std::errc() && p == digits.data() + digits.size()) {
      algo = text.substr(0, dash);
      level = parsed;
    }
  }
  CodecSpec spec;
  if (algo == "identity") spec.algorithm = Algorithm::Identity;
  else if (algo == "deflate" || algo == "zlib") spec.algorithm = Algorithm::Deflate;
  else if (algo == "lzma" || algo == "xz") spec.algorithm = Algorithm::Lzma;
  else if (algo == "lz4") spec.algorithm = Algorithm::Lz4;
  else if (algo == "lz4hc") spec.algorithm = Algorithm::Lz4Hc;
  else raise(ErrorCode::UsageError, "unknown codec '" + std::string(text) + "'");
  if (level < 0) {
    switch (spec.algorithm) {
      case Algorithm::Deflate: level = 6; break;
      case Algorithm::Lzma: level = 5; break;
      case Algorithm::Lz4Hc: level = 9; break;
      default: level = 0; break;
    }
  }
  spec.level = static_cast<std::uint8_t>(level);
  spec.validate();
  return spec;
}

CodecSpec decode_codec_pair(std::uint8_t algorithm, std::uint8_t level,
                            ErrorCode on_bad) {
  if (algorithm > static_cast<std::uint8_t>(Algorithm::Lz4Hc))
    raise(on_bad, "unknown codec id " + std::to_string(algorithm));
  CodecSpec spec{static_cast<Algorithm>(algorithm), level};
  try {
    spec.validate();
  } catch (const Error&) {
    raise(on_bad, "invalid level " + std::to_string(level) + " for codec id " +
                      std::to_string(algorithm));
  }
  return spec;
}

double CodecCounters::ratio() const {
  std::uint64_t out = bytes_out();
  if (out == 0) raise(ErrorCode::UsageError, "ratio undefined: bytes_out is 0");
  return static_cast<double>(bytes_in()) / static_cast<double>(out);
}

Bytes compress(const CodecSpec& spec, ByteSpan data, CodecCounters* counters) {
  spec.validate();
  CpuScope scope(counters, data.size());
  Bytes out;
  switch (spec.algorithm) {
    case Algorithm::Identity:
      out.assign(data.begin(), data.end());
      break;
    case Algorithm::Deflate:
      out = deflate_compress(spec.level, data);
      break;
    case Algorithm::Lzma:
      out = lzma_compress_frame(spec.level, data);
      break;
    case Algorithm::Lz4:
      out = lz4_compress_frame(0, data);
      break;
    case Algorithm::Lz4Hc:
      out = lz4_compress_frame(spec.level, data);
      break;
  }
  scope.finish(out.size());
  return out;
}

Bytes decompress(const CodecSpec& spec, ByteSpan frame,
                 std::uint64_t expected_len, CodecCounters* counters) {
  spec.validate();
  CpuScope scope(counters, frame.size());
  Bytes out;
  switch (spec.algorithm) {
    case Algorithm::Identity:
      if (frame.size() != expected_len)
        raise(ErrorCode::LengthMismatch, "identity frame length != expected");
      out.assign(frame.begin(), frame.end());
      break;
    case Algorithm::Deflate:
      out = deflate_decompress(frame, expected_len);
      break;
    case Algorithm::Lzma:
      out = lzma_decompress_frame(frame, expected_len);
      break;
    case Algorithm::Lz4:
    case Algorithm::Lz4Hc:
      out = lz4_decompress_frame(frame, expected_len);
      break;
  }
  scope.finish(out.size());
  return out;
}

std::vector<CodecInfo> list_codecs() {
  return {
      {CodecSpec::identity(), "identity", 0, 0},
      {CodecSpec::deflate(6), "deflate", 1, 9},
      {CodecSpec::lzma(5), "lzma", 1, 9},
      {CodecSpec::lz4(), "lz4", 0, 0},
      {CodecSpec::lz4hc(9), "lz4hc", 4, 9},
  };
}

}  // namespace rcf
