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
#include <vector>

#include "bank/journal.hpp"
#include "bank/snapshot.hpp"

namespace bank::persist {

inline constexpr const char* kJournalFile = "journal.log";
inline constexpr const char* kSnapshotDir = "snapshots";

struct RecoveryReport {
  std::uint64_t events = 0;          // journal records replayed (incl. incremental bodies)
  std::uint64_t discarded_tail = 0;  // 0 or 1
  std::optional<std::uint64_t> snapshot_id;  // newest snapshot of the chain used
  std::uint64_t last_seq = 0;
  std::uint64_t valid_journal_bytes = 0;
  std::vector<std::string> warnings;
};

/// What to load: an optional complete state image followed by the records to
/// apply on top of it, in sequence order.
struct RecoveryPlan {
  std::optional<std::string> base_state;
  std::vector<JournalRecord> records;
  /// Snapshot chain that was used, oldest first. The last entry is the base
  /// for the next incremental snapshot.
  std::vector<SnapshotInfo> chain;
  RecoveryReport report;
};

/// Reads `data_dir` without modifying it. Picks the newest complete snapshot
/// that verifies, extends it with the incrementals built on it (stopping at
/// the first bad one) and checks that the journal continues from there.
/// Older chains are tried when a newer one cannot be used.
/// Throws CORRUPT_JOURNAL or CORRUPT_SNAPSHOT.
RecoveryPlan plan_recovery(const fs::path& data_dir);

}  // namespace bank::persist
