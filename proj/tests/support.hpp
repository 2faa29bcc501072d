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

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcf/codec.hpp"

namespace testsupport {

/// Runs fn, which must raise, and returns the error code it carried.
/// A missing error surfaces as an unexpected-exception test failure.
inline rcf::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const rcf::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an rcf::Error, none was raised");
}

/// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "rcf-test-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }

 private:
  std::string path_;
};

inline rcf::Bytes random_bytes(std::mt19937_64& rng, std::size_t len) {
  rcf::Bytes out(len);
  for (std::size_t i = 0; i < len; ++i)
    out[i] = static_cast<std::uint8_t>(rng() & 0xff);
  return out;
}

/// Byte stream with enough short-range repetition to actually compress.
inline rcf::Bytes compressible_bytes(std::mt19937_64& rng, std::size_t len) {
  rcf::Bytes out(len);
  std::uint8_t v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (i % 13 == 0) v = static_cast<std::uint8_t>(rng() & 0x1f);
    out[i] = v;
  }
  return out;
}

/// Every supported (algorithm, level) pair.
inline std::vector<rcf::CodecSpec> all_codec_specs() {
  std::vector<rcf::CodecSpec> specs;
  specs.push_back(rcf::CodecSpec::identity());
  for (int level = 1; level <= 9; ++level)
    specs.push_back(rcf::CodecSpec::deflate(level));
  for (int level = 1; level <= 9; ++level)
    specs.push_back(rcf::CodecSpec::lzma(level));
  specs.push_back(rcf::CodecSpec::lz4());
  for (int level = 4; level <= 9; ++level)
    specs.push_back(rcf::CodecSpec::lz4hc(level));
  return specs;
}

}  // namespace testsupport
