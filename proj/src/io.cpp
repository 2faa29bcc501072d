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

#include "rcf/io.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace rcf {

namespace {

[[noreturn]] void io_fail(const std::string& what, const std::string& path) {
  raise(ErrorCode::IoFailure, what + " '" + path + "': " + std::strerror(errno));
}

}  // namespace

FileReader::FileReader(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd_ < 0) io_fail("cannot open", path);
  struct stat st{};
  if (::fstat(fd_, &st) != 0) {
    ::close(fd_);
    io_fail("cannot stat", path);
  }
  size_ = static_cast<std::uint64_t>(st.st_size);
}

FileReader::~FileReader() {
  if (fd_ >= 0) ::close(fd_);
}

void FileReader::read_at(std::uint64_t offset, std::uint8_t* out,
                         std::size_t len) const {
  std::size_t done = 0;
  while (done < len) {
    ssize_t n = ::pread(fd_, out + done, len - done,
                        static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("read failed on", path_);
    }
    if (n == 0)
      raise(ErrorCode::IoFailure, "unexpected end of file '" + path_ + "'");
    done += static_cast<std::size_t>(n);
  }
}

Bytes FileReader::read_at(std::uint64_t offset, std::size_t len) const {
  Bytes out(len);
  read_at(offset, out.data(), len);
  return out;
}

FileWriter::FileWriter(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd_ < 0) io_fail("cannot create", path);
}

FileWriter::~FileWriter() {
  if (fd_ >= 0) ::close(fd_);
}

void FileWriter::write(ByteSpan data) {
  if (fd_ < 0) raise(ErrorCode::IoFailure, "write on closed file '" + path_ + "'");
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd_, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write failed on", path_);
    }
    done += static_cast<std::size_t>(n);
  }
  offset_ += data.size();
}

void FileWriter::close() {
  if (fd_ < 0) return;
  int rc = ::close(fd_);
  fd_ = -1;
  if (rc != 0) io_fail("close failed on", path_);
}

Bytes read_whole_file(const std::string& path) {
  FileReader in(path);
  return in.read_at(0, static_cast<std::size_t>(in.size()));
}

void write_whole_file(const std::string& path, ByteSpan data) {
  FileWriter out(path);
  out.write(data);
  out.close();
}

}  // namespace rcf
