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

#include "bank/journal.hpp"
#include "bank/time.hpp"

namespace bank::persist {

enum class SnapshotMode : std::uint8_t { complete, incremental };

std::string_view to_string(SnapshotMode m);
std::optional<SnapshotMode> parse_snapshot_mode(std::string_view s);

struct SnapshotInfo {
  std::uint64_t id = 0;
  SnapshotMode mode = SnapshotMode::complete;
  std::optional<std::uint64_t> base_id;  // incremental only
  std::uint64_t upto_seq = 0;
  Timestamp created_at;
  std::uint32_t checksum = 0;  // crc32 of the whole .snap file minus its trailer

  /// One manifest line: "<id> <mode> <base|-> <upto> <created_ms> <crc hex>".
  std::string manifest_line() const;
  static std::optional<SnapshotInfo> parse_manifest_line(std::string_view line);
};

/// Incremental snapshot body: the journal records it covers.
std::string encode_record_batch(const std::vector<JournalRecord>& records);
std::vector<JournalRecord> decode_record_batch(std::string_view bytes);

/// `<dir>/<id>.snap` files plus a text `manifest`, one line per snapshot.
class SnapshotStore {
 public:
  explicit SnapshotStore(fs::path dir);

  /// Writes the file durably, then appends to the manifest.
  SnapshotInfo write(SnapshotMode mode, std::optional<std::uint64_t> base_id,
                     std::uint64_t upto_seq, Timestamp created_at, std::string_view payload);
  /// Manifest entries in id order; malformed lines (a torn append) are skipped.
  std::vector<SnapshotInfo> list() const;
  /// Verified payload. Throws CORRUPT_SNAPSHOT.
  std::string read_payload(const SnapshotInfo& info) const;

  fs::path file_for(std::uint64_t id) const;
  const fs::path& dir() const { return dir_; }
  fs::path manifest() const { return dir_ / "manifest"; }

 private:
  fs::path dir_;
};

}  // namespace bank::persist
