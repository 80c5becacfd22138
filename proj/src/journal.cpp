// Copyright 2026 The ibank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bank/journal.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bank/codec.hpp"
#include "bank/error.hpp"

namespace bank::persist {

namespace {

std::uint64_t load_u64(std::string_view b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<std::uint8_t>(b[at + i])} << (8 * i);
  return v;
}

std::uint32_t load_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<std::uint8_t>(b[at + i])} << (8 * i);
  return v;
}

[[noreturn]] void storage_failure(const std::string& what) {
  fail(ErrorCode::STORAGE_FAILURE, what + ": " + std::strerror(errno));
}

bool write_all(int fd, const char* p, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

// A full, checksum-valid record (with this seq, when given) starts at `at`.
bool valid_record_at(std::string_view data, std::size_t at, std::optional<std::uint64_t> seq) {
  if (data.size() - at < kRecordHeaderBytes + kRecordTrailerBytes) return false;
  if (seq && load_u64(data, at) != *seq) return false;
  const std::uint32_t len = load_u32(data, at + 16);
  const std::uint64_t total = kRecordHeaderBytes + std::uint64_t{len} + kRecordTrailerBytes;
  if (total > data.size() - at) return false;
  const std::string_view body = data.substr(at, kRecordHeaderBytes + len);
  return crc32(body) == load_u32(data, at + kRecordHeaderBytes + len);
}

// After a damaged record: is there intact data beyond it (mid-stream
// corruption) or is this a torn final write?
bool later_record_exists(std::string_view data, std::size_t from,
                         std::optional<std::uint64_t> next_seq) {
  for (std::size_t at = from; at + kRecordHeaderBytes + kRecordTrailerBytes <= data.size(); ++at)
    if (valid_record_at(data, at, next_seq)) return true;
  return false;
}

}  // namespace

std::string encode_record(const JournalRecord& r) {
  Encoder e;
  e.u64(r.seq);
  e.i64(r.written_at.millis);
  e.u32(static_cast<std::uint32_t>(r.payload.size()));
  e.raw(r.payload);
  const std::uint32_t crc = crc32(e.bytes());
  e.u32(crc);
  return e.take();
}

JournalScan scan_journal(const fs::path& file) {
  JournalScan out;
  if (!fs::exists(file)) return out;
  const std::string data = read_file(file);
  const std::string_view view(data);

  std::size_t at = 0;
  std::optional<std::uint64_t> expected;
  while (at < data.size()) {
    const std::size_t remaining = data.size() - at;
    auto discard_tail = [&] {
      out.discarded_tail = 1;
      out.discarded_bytes = remaining;
    };
    if (remaining < kRecordHeaderBytes + kRecordTrailerBytes) {
      discard_tail();
      break;
    }
    const std::uint64_t seq = load_u64(view, at);
    const std::uint32_t len = load_u32(view, at + 16);
    const std::uint64_t total = kRecordHeaderBytes + std::uint64_t{len} + kRecordTrailerBytes;
    const std::uint64_t want_next = (expected ? *expected : seq) + 1;
    if (len > kMaxPayloadBytes || total > remaining) {
      if (later_record_exists(view, at + 1, want_next))
        fail(ErrorCode::CORRUPT_JOURNAL, "record length corrupt at offset " + std::to_string(at));
      discard_tail();
      break;
    }
    const std::string_view body = view.substr(at, kRecordHeaderBytes + len);
    if (crc32(body) != load_u32(view, at + kRecordHeaderBytes + len)) {
      // The damaged header can't be trusted for seq, so accept any later record.
      if (!later_record_exists(view, at + 1, std::nullopt)) {
        discard_tail();
        break;
      }
      fail(ErrorCode::CORRUPT_JOURNAL, "checksum mismatch at offset " + std::to_string(at));
    }
    if (expected && seq != *expected)
      fail(ErrorCode::CORRUPT_JOURNAL, "sequence gap at offset " + std::to_string(at));
    JournalRecord r;
    r.seq = seq;
    r.written_at = Timestamp{static_cast<std::int64_t>(load_u64(view, at + 8))};
    r.payload = std::string(view.substr(at + kRecordHeaderBytes, len));
    out.records.push_back(std::move(r));
    expected = seq + 1;
    at += total;
    out.valid_bytes = at;
  }
  return out;
}

Journal::Journal(fs::path file, std::uint64_t next_seq, std::uint64_t valid_bytes,
                 JournalOptions options)
    : file_(std::move(file)), options_(options), next_seq_(next_seq) {
  if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
  reopen();
  struct stat st {};
  if (::fstat(fd_, &st) != 0) storage_failure("stat journal");
  if (static_cast<std::uint64_t>(st.st_size) > valid_bytes) {
    if (::ftruncate(fd_, static_cast<off_t>(valid_bytes)) != 0) storage_failure("truncate journal tail");
    ::fsync(fd_);
  }
  size_ = std::min<std::uint64_t>(valid_bytes, static_cast<std::uint64_t>(st.st_size));
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

void Journal::reopen() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = ::open(file_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) storage_failure("open journal " + file_.string());
}

std::uint64_t Journal::append(std::string_view payload, Timestamp now) {
  const std::uint64_t seq = next_seq_;
  const std::string bytes = encode_record({seq, now, std::string(payload)});

  std::size_t writable = bytes.size();
  bool full = false;
  if (options_.capacity_bytes && size_ + bytes.size() > *options_.capacity_bytes) {
    writable = *options_.capacity_bytes > size_ ? *options_.capacity_bytes - size_ : 0;
    full = true;
  }
  const bool wrote = write_all(fd_, bytes.data(), writable);
  const bool synced = wrote && (!options_.sync || ::fdatasync(fd_) == 0);
  if (full || !wrote || !synced) {
    const int saved = full ? ENOSPC : errno;
    // roll back whatever made it out; recovery handles it if this fails too
    if (::ftruncate(fd_, static_cast<off_t>(size_)) == 0 && options_.sync) ::fdatasync(fd_);
    healthy_ = false;
    errno = saved;
    storage_failure("journal append");
  }
  size_ += bytes.size();
  ++next_seq_;
  healthy_ = true;
  return seq;
}

void Journal::truncate_prefix(std::uint64_t upto) {
  const JournalScan scan = scan_journal(file_);
  std::string kept;
  for (const auto& r : scan.records)
    if (r.seq > upto) kept += encode_record(r);
  write_file_atomic(file_, kept);
  reopen();
  size_ = kept.size();
}

void write_file_atomic(const fs::path& file, std::string_view bytes) {
  const fs::path tmp = file.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) storage_failure("open " + tmp.string());
  const bool ok = write_all(fd, bytes.data(), bytes.size()) && ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) storage_failure("write " + tmp.string());
  if (::rename(tmp.c_str(), file.c_str()) != 0) storage_failure("rename " + tmp.string());
  fsync_dir(file.parent_path());
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::STORAGE_FAILURE, "cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bank::persist
