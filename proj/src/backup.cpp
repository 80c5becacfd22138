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

#include "bank/backup.hpp"

#include <spdlog/spdlog.h>

#include <cstdio>
#include <sstream>

#include "bank/codec.hpp"
#include "bank/error.hpp"
#include "bank/journal.hpp"

namespace bank::persist {

namespace {

std::string manifest_text(const std::vector<OffsiteFile>& files) {
  std::ostringstream os;
  for (const auto& f : files) {
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", f.crc);
    os << crc << ' ' << f.size << ' ' << f.path << '\n';
  }
  return os.str();
}

}  // namespace

OffsiteReport offsite_copy(const fs::path& data_dir, const fs::path& target) {
  std::error_code ec;
  fs::create_directories(target, ec);
  if (ec || !fs::is_directory(target))
    fail(ErrorCode::TARGET_UNWRITABLE, "cannot create " + target.string());
  if (fs::exists(data_dir) && fs::equivalent(data_dir, target, ec))
    fail(ErrorCode::TARGET_UNWRITABLE, "target is the data directory");

  OffsiteReport report;
  report.target = target;
  std::vector<fs::path> sources;
  if (fs::exists(data_dir))
    for (const auto& de : fs::recursive_directory_iterator(data_dir))
      if (de.is_regular_file()) sources.push_back(de.path());
  std::sort(sources.begin(), sources.end());

  for (const auto& src : sources) {
    const fs::path rel = fs::relative(src, data_dir);
    if (rel == kOffsiteManifest) continue;
    const std::string bytes = read_file(src);
    const fs::path dst = target / rel;
    try {
      fs::create_directories(dst.parent_path());
      write_file_atomic(dst, bytes);
    } catch (const std::exception& e) {
      fail(ErrorCode::TARGET_UNWRITABLE, e.what());
    }
    report.files.push_back({rel.generic_string(), bytes.size(), crc32(bytes)});
    report.bytes += bytes.size();
  }
  try {
    write_file_atomic(target / kOffsiteManifest, manifest_text(report.files));
  } catch (const std::exception& e) {
    fail(ErrorCode::TARGET_UNWRITABLE, e.what());
  }
  verify_offsite(target);
  return report;
}

OffsiteReport verify_offsite(const fs::path& target) {
  const fs::path manifest = target / kOffsiteManifest;
  if (!fs::exists(manifest)) fail(ErrorCode::VERIFY_FAILED, "no manifest in " + target.string());
  OffsiteReport report;
  report.target = target;
  std::istringstream in(read_file(manifest));
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string crc_hex;
    OffsiteFile f;
    ls >> crc_hex >> f.size;
    ls.ignore(1);
    std::getline(ls, f.path);
    if (!ls.eof() && ls.fail()) fail(ErrorCode::VERIFY_FAILED, "bad manifest line: " + line);
    try {
      f.crc = static_cast<std::uint32_t>(std::stoul(crc_hex, nullptr, 16));
    } catch (const std::exception&) {
      fail(ErrorCode::VERIFY_FAILED, "bad manifest line: " + line);
    }
    const fs::path file = target / f.path;
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) fail(ErrorCode::VERIFY_FAILED, "missing " + f.path);
    const std::string bytes = read_file(file);
    if (bytes.size() != f.size || crc32(bytes) != f.crc)
      fail(ErrorCode::VERIFY_FAILED, "checksum mismatch on " + f.path);
    report.bytes += f.size;
    report.files.push_back(std::move(f));
  }
  return report;
}

void validate(const BackupConfig& config) {
  if (config.interval_s <= 0) fail(ErrorCode::CONFIG_INVALID, "backup.interval_s must be > 0");
  if (config.complete_every == 0)
    fail(ErrorCode::CONFIG_INVALID, "backup.complete_every must be > 0");
}

BackupScheduler::BackupScheduler(BackupConfig config, BackupHooks hooks)
    : config_(std::move(config)), hooks_(std::move(hooks)) {
  validate(config_);
}

SnapshotMode BackupScheduler::next_mode() const {
  return runs_ % config_.complete_every == 0 ? SnapshotMode::complete : SnapshotMode::incremental;
}

TickResult BackupScheduler::tick(Timestamp now) {
  TickResult out;
  if (last_ && now.millis - last_->millis < config_.interval_s * 1000) return out;
  try {
    out.snapshot = hooks_.snapshot(next_mode());
  } catch (const std::exception& e) {
    out.error = e.what();
    spdlog::error("scheduled backup failed: {}", e.what());
    return out;
  }
  ++runs_;
  last_ = now;
  spdlog::info("backup {} ({}) up to seq {}", out.snapshot->id, to_string(out.snapshot->mode),
               out.snapshot->upto_seq);
  if (config_.offsite_target && hooks_.offsite) {
    try {
      hooks_.offsite(*config_.offsite_target);
    } catch (const std::exception& e) {
      out.offsite_error = e.what();
      spdlog::error("off-site copy to {} failed: {}", config_.offsite_target->string(), e.what());
    }
  }
  return out;
}

}  // namespace bank::persist
