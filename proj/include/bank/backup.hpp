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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bank/snapshot.hpp"
#include "bank/time.hpp"

namespace bank::persist {

inline constexpr const char* kOffsiteManifest = "OFFSITE.manifest";

struct OffsiteFile {
  std::string path;  // relative, '/'-separated
  std::uint64_t size = 0;
  std::uint32_t crc = 0;
};

struct OffsiteReport {
  fs::path target;
  std::vector<OffsiteFile> files;
  std::uint64_t bytes = 0;
};

/// Copies every regular file under `data_dir` (journal, snapshots and
/// anything else kept there, such as config or binaries) into `target`,
/// writes a checksum manifest and verifies the copy.
/// Throws TARGET_UNWRITABLE or VERIFY_FAILED.
OffsiteReport offsite_copy(const fs::path& data_dir, const fs::path& target);
/// Re-reads `target` against its manifest. Throws VERIFY_FAILED.
OffsiteReport verify_offsite(const fs::path& target);

struct BackupConfig {
  std::int64_t interval_s = 3600;
  /// Run n (0-based) is complete when n % complete_every == 0.
  std::uint32_t complete_every = 4;
  std::optional<fs::path> offsite_target;
};

/// Throws CONFIG_INVALID.
void validate(const BackupConfig& config);

struct BackupHooks {
  std::function<SnapshotInfo(SnapshotMode)> snapshot;
  std::function<void(const fs::path&)> offsite;
};

struct TickResult {
  std::optional<SnapshotInfo> snapshot;
  std::optional<std::string> error;          // snapshot failed; retried next tick
  std::optional<std::string> offsite_error;  // snapshot kept; copy retried next run
};

/// Decides when to back up and which mode to use. Not thread-safe.
class BackupScheduler {
 public:
  BackupScheduler(BackupConfig config, BackupHooks hooks);

  /// Takes a backup when none has run yet or interval_s has elapsed since
  /// the last successful one.
  TickResult tick(Timestamp now);

  std::uint64_t runs() const { return runs_; }
  std::optional<Timestamp> last_backup() const { return last_; }
  const BackupConfig& config() const { return config_; }
  SnapshotMode next_mode() const;

 private:
  BackupConfig config_;
  BackupHooks hooks_;
  std::uint64_t runs_ = 0;
  std::optional<Timestamp> last_;
};

}  // namespace bank::persist
