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

#include "rcf/bytes.hpp"

namespace rcf {

/// Read-only file handle. pread-based, so concurrent reads need no
/// external locking. All failures raise IoFailure.
class FileReader {
 public:
  explicit FileReader(const std::string& path);
  ~FileReader();
  FileReader(const FileReader&) = delete;
  FileReader& operator=(const FileReader&) = delete;

  std::uint64_t size() const { return size_; }
  const std::string& path() const { return path_; }

  /// Reads exactly [offset, offset + len); short reads raise IoFailure.
  void read_at(std::uint64_t offset, std::uint8_t* out, std::size_t len) const;
  Bytes read_at(std::uint64_t offset, std::size_t len) const;

 private:
  std::string path_;
  int fd_ = -1;
  std::uint64_t size_ = 0;
};

/// Append-only file writer; creates or truncates. Tracks the running
/// offset so callers can record locators as they go.
class FileWriter {
 public:
  explicit FileWriter(const std::string& path);
  ~FileWriter();
  FileWriter(const FileWriter&) = delete;
  FileWriter& operator=(const FileWriter&) = delete;

  void write(ByteSpan data);
  std::uint64_t offset() const { return offset_; }
  void close();

 private:
  std::string path_;
  int fd_ = -1;
  std::uint64_t offset_ = 0;
};

Bytes read_whole_file(const std::string& path);
void write_whole_file(const std::string& path, ByteSpan data);

}  // namespace rcf
