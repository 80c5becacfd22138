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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bank/time.hpp"

namespace bank::persist {

namespace fs = std::filesystem;

/// On-disk record: u64 seq | u64 unix-millis | u32 payload-length | payload |
/// u32 crc32. All little-endian. The checksum covers every byte before it.
inline constexpr std::size_t kRecordHeaderBytes = 8 + 8 + 4;
inline constexpr std::size_t kRecordTrailerBytes = 4;
inline constexpr std::uint32_t kMaxPayloadBytes = 64u << 20;

struct JournalRecord {
  std::uint64_t seq = 0;
  Timestamp written_at;
  std::string payload;
};

std::string encode_record(const JournalRecord& r);

struct JournalScan {
  std::vector<JournalRecord> records;  // contiguous seqs
  std::uint64_t valid_bytes = 0;       // length of the intact prefix
  std::uint64_t discarded_tail = 0;    // 1 when a torn/corrupt final record was dropped
  std::uint64_t discarded_bytes = 0;
};

/// Reads and verifies a journal file. A missing file scans as empty. A bad
/// final record is reported as a discarded tail; corruption anywhere
/// earlier throws CORRUPT_JOURNAL.
JournalScan scan_journal(const fs::path& file);

struct JournalOptions {
  /// fdatasync before acknowledging an append.
  bool sync = true;
  /// Simulated device size; appends that would exceed it fail with
  /// STORAGE_FAILURE after writing the bytes that fit.
  std::optional<std::uint64_t> capacity_bytes;
};

/// Append-only writer. One appender per file.
class Journal {
 public:
  /// Opens `file` for appending after `valid_bytes` (anything beyond is cut
  /// off). `next_seq` is the sequence the next append receives.
  Journal(fs::path file, std::uint64_t next_seq, std::uint64_t valid_bytes,
          JournalOptions options = {});
  ~Journal();

  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  /// Durable once this returns. Throws STORAGE_FAILURE; the file is rolled
  /// back to its previous length when possible.
  std::uint64_t append(std::string_view payload, Timestamp now);

  /// Rewrites the file without records whose seq <= upto.
  void truncate_prefix(std::uint64_t upto);

  std::uint64_t last_seq() const { return next_seq_ - 1; }
  std::uint64_t size_bytes() const { return size_; }
  bool healthy() const { return healthy_; }
  const fs::path& file() const { return file_; }
  void set_capacity(std::optional<std::uint64_t> bytes) { options_.capacity_bytes = bytes; }

 private:
  void reopen();

  fs::path file_;
  JournalOptions options_;
  int fd_ = -1;
  std::uint64_t next_seq_;
  std::uint64_t size_ = 0;
  bool healthy_ = true;
};

/// Writes `bytes` to `file` via a temporary and an atomic rename, fsyncing both.
void write_file_atomic(const fs::path& file, std::string_view bytes);
std::string read_file(const fs::path& file);

}  // namespace bank::persist
