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

#include "bank/snapshot.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <sstream>

#include "bank/codec.hpp"
#include "bank/error.hpp"

namespace bank::persist {

namespace {

constexpr std::string_view kSnapMagic = "IBSNAP01";

template <class T>
bool parse_num(std::string_view s, T& out, int base = 10) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

std::string_view to_string(SnapshotMode m) {
  return m == SnapshotMode::complete ? "complete" : "incremental";
}

std::optional<SnapshotMode> parse_snapshot_mode(std::string_view s) {
  if (s == "complete") return SnapshotMode::complete;
  if (s == "incremental") return SnapshotMode::incremental;
  return std::nullopt;
}

std::string SnapshotInfo::manifest_line() const {
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08x", checksum);
  std::ostringstream os;
  os << id << ' ' << to_string(mode) << ' ' << (base_id ? std::to_string(*base_id) : "-") << ' '
     << upto_seq << ' ' << created_at.millis << ' ' << crc;
  return os.str();
}

std::optional<SnapshotInfo> SnapshotInfo::parse_manifest_line(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t sp = line.find(' ', start);
    const std::size_t end = sp == std::string_view::npos ? line.size() : sp;
    f.push_back(line.substr(start, end - start));
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  if (f.size() != 6) return std::nullopt;
  SnapshotInfo s;
  auto mode = parse_snapshot_mode(f[1]);
  if (!mode || !parse_num(f[0], s.id) || !parse_num(f[3], s.upto_seq) ||
      !parse_num(f[4], s.created_at.millis) || f[5].size() != 8 || !parse_num(f[5], s.checksum, 16))
    return std::nullopt;
  s.mode = *mode;
  if (f[2] != "-") {
    std::uint64_t base = 0;
    if (!parse_num(f[2], base)) return std::nullopt;
    s.base_id = base;
  }
  if ((s.mode == SnapshotMode::incremental) != s.base_id.has_value()) return std::nullopt;
  return s;
}

std::string encode_record_batch(const std::vector<JournalRecord>& records) {
  Encoder e;
  e.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    e.u64(r.seq);
    e.i64(r.written_at.millis);
    e.str(r.payload);
  }
  return e.take();
}

std::vector<JournalRecord> decode_record_batch(std::string_view bytes) {
  Decoder d(bytes);
  std::vector<JournalRecord> out(d.u32());
  for (auto& r : out) {
    r.seq = d.u64();
    r.written_at.millis = d.i64();
    r.payload = d.str();
  }
  d.expect_done();
  return out;
}

SnapshotStore::SnapshotStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path SnapshotStore::file_for(std::uint64_t id) const {
  return dir_ / (std::to_string(id) + ".snap");
}

SnapshotInfo SnapshotStore::write(SnapshotMode mode, std::optional<std::uint64_t> base_id,
                                  std::uint64_t upto_seq, Timestamp created_at,
                                  std::string_view payload) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::STORAGE_FAILURE, "cannot create " + dir_.string());

  std::uint64_t id = 1;
  for (const auto& s : list()) id = std::max(id, s.id + 1);

  SnapshotInfo info;
  info.id = id;
  info.mode = mode;
  info.base_id = base_id;
  info.upto_seq = upto_seq;
  info.created_at = created_at;

  Encoder e;
  e.raw(kSnapMagic);
  e.u64(info.id);
  e.u8(static_cast<std::uint8_t>(mode));
  e.u64(base_id.value_or(0));
  e.u64(upto_seq);
  e.i64(created_at.millis);
  e.str(payload);
  info.checksum = crc32(e.bytes());
  e.u32(info.checksum);
  write_file_atomic(file_for(id), e.bytes());

  std::string line = info.manifest_line() + "\n";
  // Start a fresh line after a torn append so this entry stays parseable.
  if (fs::exists(manifest())) {
    const std::string existing = read_file(manifest());
    if (!existing.empty() && existing.back() != '\n') line.insert(line.begin(), '\n');
  }
  const int fd = ::open(manifest().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorCode::STORAGE_FAILURE, "cannot open manifest");
  const bool ok = ::write(fd, line.data(), line.size()) == static_cast<ssize_t>(line.size()) &&
                  ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) fail(ErrorCode::STORAGE_FAILURE, "cannot append manifest");
  return info;
}

std::vector<SnapshotInfo> SnapshotStore::list() const {
  std::vector<SnapshotInfo> out;
  if (!fs::exists(manifest())) return out;
  std::istringstream in(read_file(manifest()));
  std::string line;
  while (std::getline(in, line))
    if (auto s = SnapshotInfo::parse_manifest_line(line)) out.push_back(*s);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::string SnapshotStore::read_payload(const SnapshotInfo& info) const {
  const fs::path file = file_for(info.id);
  auto corrupt = [&](const std::string& why) -> std::string {
    fail(ErrorCode::CORRUPT_SNAPSHOT, "snapshot " + std::to_string(info.id) + ": " + why);
  };
  std::error_code ec;
  if (!fs::exists(file, ec)) return corrupt("missing");
  const std::string data = read_file(file);
  if (data.size() < kSnapMagic.size() + 4) return corrupt("truncated");
  const std::string_view body(data.data(), data.size() - 4);
  Decoder trailer(std::string_view(data).substr(data.size() - 4));
  const std::uint32_t stored = trailer.u32();
  if (crc32(body) != stored || stored != info.checksum) return corrupt("checksum mismatch");
  try {
    Decoder d(body);
    std::string magic(kSnapMagic.size(), '\0');
    for (auto& c : magic) c = static_cast<char>(d.u8());
    if (magic != kSnapMagic) return corrupt("bad magic");
    const std::uint64_t id = d.u64();
    const auto mode = static_cast<SnapshotMode>(d.u8());
    const std::uint64_t base = d.u64();
    const std::uint64_t upto = d.u64();
    d.i64();
    std::string payload = d.str();
    d.expect_done();
    if (id != info.id || mode != info.mode || upto != info.upto_seq ||
        base != info.base_id.value_or(0))
      return corrupt("header disagrees with manifest");
    return payload;
  } catch (const DecodeError& e) {
    return corrupt(e.what());
  }
}

}  // namespace bank::persist
