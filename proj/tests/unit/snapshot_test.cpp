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

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "bank/bank.hpp"
#include "bank/journal.hpp"
#include "bank/recovery.hpp"
#include "bank/snapshot.hpp"
#include "harness.hpp"

namespace bank::persist {
namespace {

using bank::testing::error_of;
using bank::testing::TempDir;
using bank::testing::World;

void flip_byte(const fs::path& p, std::size_t offset) {
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(static_cast<std::streamoff>(offset));
  char c = 0;
  f.read(&c, 1);
  c = static_cast<char>(c ^ 0x5a);
  f.seekp(static_cast<std::streamoff>(offset));
  f.write(&c, 1);
}

/// Drives one customer through a few own-account transfers.
struct Activity {
  explicit Activity(World& w) : world(w) {
    c = w.add_customer("alice", {bank::testing::current(1'000'000), bank::testing::saving(0)});
  }

  void transfers(int n) {
    for (int i = 0; i < n; ++i) {
      TransferRequest r;
      r.source = c.accounts[i % 2];
      r.target.account = c.accounts[(i + 1) % 2];
      r.amount = bank::testing::myr(1 + (i % 7));
      r.effective_date = Date::of(world.clock->now());
      r.tac = world->issue_tac(c.token);
      error_of([&] { world->create_transfer(c.token, r); });
    }
  }

  World& world;
  bank::testing::Customer c;
};

TEST(SnapshotInfoTest, ManifestLineRoundTrip) {
  SnapshotInfo a{3, SnapshotMode::incremental, 2, 120, Timestamp{1700000000123}, 0xdeadbeef};
  auto parsed = SnapshotInfo::parse_manifest_line(a.manifest_line());
  ASSERT_TRUE(parsed);
  EXPECT_EQ(parsed->id, 3u);
  EXPECT_EQ(parsed->mode, SnapshotMode::incremental);
  EXPECT_EQ(parsed->base_id, 2u);
  EXPECT_EQ(parsed->upto_seq, 120u);
  EXPECT_EQ(parsed->created_at.millis, 1700000000123);
  EXPECT_EQ(parsed->checksum, 0xdeadbeefu);

  SnapshotInfo c{1, SnapshotMode::complete, std::nullopt, 5, Timestamp{1}, 1};
  parsed = SnapshotInfo::parse_manifest_line(c.manifest_line());
  ASSERT_TRUE(parsed);
  EXPECT_FALSE(parsed->base_id);
}

TEST(SnapshotInfoTest, MalformedLinesRejected) {
  for (const char* line : {"", "1", "1 complete - 5 10", "x complete - 5 10 ff",
                           "1 weird - 5 10 ff", "2 incremental - 5 10 ff",
                           "1 complete 3 5 10 ff", "1 complete - 5 10 zz"})
    EXPECT_FALSE(SnapshotInfo::parse_manifest_line(line)) << line;
}

TEST(SnapshotStoreTest, TornManifestLineIsSkipped) {
  TempDir dir;
  SnapshotStore store(dir.path());
  store.write(SnapshotMode::complete, std::nullopt, 4, Timestamp{1}, "state");
  {
    std::ofstream out(store.manifest(), std::ios::app);
    out << "2 incre";
  }
  auto list = store.list();
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(store.read_payload(list[0]), "state");
  EXPECT_EQ(store.write(SnapshotMode::incremental, 1, 6, Timestamp{2}, "x").id, 2u);
  EXPECT_EQ(store.list().size(), 2u);
}

TEST(SnapshotStoreTest, CorruptFileDetected) {
  TempDir dir;
  SnapshotStore store(dir.path());
  auto info = store.write(SnapshotMode::complete, std::nullopt, 4, Timestamp{1}, "some state bytes");
  flip_byte(store.file_for(info.id), fs::file_size(store.file_for(info.id)) - 8);
  EXPECT_EQ(error_of([&] { store.read_payload(info); }), ErrorCode::CORRUPT_SNAPSHOT);
}

TEST(SnapshotStoreTest, RecordBatchRoundTrip) {
  std::vector<JournalRecord> in{{1, Timestamp{10}, "a"}, {2, Timestamp{20}, std::string("\0b", 2)}};
  auto out = decode_record_batch(encode_record_batch(in));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].seq, 2u);
  EXPECT_EQ(out[1].payload, in[1].payload);
  EXPECT_TRUE(decode_record_batch(encode_record_batch({})).empty());
}

TEST(SnapshotBankTest, IncrementalWithoutBaseFails) {
  TempDir dir;
  World w(dir.path());
  EXPECT_EQ(error_of([&] { w->snapshot(SnapshotMode::incremental); }), ErrorCode::NO_BASE);
}

TEST(SnapshotBankTest, CompleteSnapshotSurvivesJournalCompaction) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  std::string expected;
  {
    World w(dir.path(), clock);
    Activity a(w);
    a.transfers(20);
    auto snap = w->snapshot(SnapshotMode::complete);
    EXPECT_EQ(snap.upto_seq, w->health().journal_seq);
    w->compact_journal();
    EXPECT_TRUE(scan_journal(dir / kJournalFile).records.empty());
    a.transfers(5);
    expected = w->state_bytes();
  }
  World again(dir.path(), clock);
  EXPECT_EQ(again->state_bytes(), expected);
  EXPECT_EQ(again->recovery_report().snapshot_id, 1u);
  EXPECT_EQ(again->recovery_report().events, 5u);
}

TEST(SnapshotBankTest, ChainPlusTailEqualsReplay) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  std::string expected;
  {
    World w(dir.path(), clock);
    Activity a(w);
    a.transfers(4);
    w->snapshot(SnapshotMode::complete);
    a.transfers(3);
    w->snapshot(SnapshotMode::incremental);
    a.transfers(3);
    auto inc = w->snapshot(SnapshotMode::incremental);
    EXPECT_EQ(inc.base_id, 2u);
    w->compact_journal();
    a.transfers(2);
    expected = w->state_bytes();
  }
  World again(dir.path(), clock);
  EXPECT_EQ(again->state_bytes(), expected);
  EXPECT_EQ(again->recovery_report().snapshot_id, 3u);

  // The same history replayed from nothing but a fresh journal.
  TempDir plain;
  World replay(plain.path(), clock);
  Activity b(replay);
  b.transfers(4);
  b.transfers(3);
  b.transfers(3);
  b.transfers(2);
  EXPECT_EQ(bank::testing::business_state(*replay), bank::testing::business_state(*again));
}

TEST(SnapshotBankTest, CorruptNewestCompleteFallsBackToOlderChain) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  std::string expected;
  {
    World w(dir.path(), clock);
    Activity a(w);
    a.transfers(3);
    w->snapshot(SnapshotMode::complete);
    a.transfers(3);
    w->snapshot(SnapshotMode::complete);
    a.transfers(3);
    expected = w->state_bytes();
  }
  const fs::path snap2 = SnapshotStore(dir / kSnapshotDir).file_for(2);
  flip_byte(snap2, 20);
  World again(dir.path(), clock);
  EXPECT_EQ(again->state_bytes(), expected);
  EXPECT_EQ(again->recovery_report().snapshot_id, 1u);
  EXPECT_FALSE(again->recovery_report().warnings.empty());
}

TEST(SnapshotBankTest, CorruptIncrementalStopsChainThere) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  std::string expected;
  {
    World w(dir.path(), clock);
    Activity a(w);
    a.transfers(3);
    w->snapshot(SnapshotMode::complete);
    a.transfers(3);
    w->snapshot(SnapshotMode::incremental);
    a.transfers(3);
    expected = w->state_bytes();
  }
  flip_byte(SnapshotStore(dir / kSnapshotDir).file_for(2), 20);
  // The journal still covers everything after the complete snapshot.
  World again(dir.path(), clock);
  EXPECT_EQ(again->state_bytes(), expected);
  EXPECT_EQ(again->recovery_report().snapshot_id, 1u);
}

TEST(SnapshotBankTest, CompactedJournalWithoutUsableSnapshotIsFatal) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  {
    World w(dir.path(), clock);
    Activity a(w);
    a.transfers(3);
    w->snapshot(SnapshotMode::complete);
    w->compact_journal();
    a.transfers(2);
  }
  flip_byte(SnapshotStore(dir / kSnapshotDir).file_for(1), 20);
  EXPECT_EQ(error_of([&] { World again(dir.path(), clock); }), ErrorCode::CORRUPT_SNAPSHOT);
}

TEST(SnapshotBankTest, RandomSchedulesMatchJournalReplay) {
  std::mt19937_64 rng(17);
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  for (int round = 0; round < 10; ++round) {
    TempDir dir, plain;
    World w(dir.path(), clock);
    World replay(plain.path(), clock);
    Activity a(w), b(replay);
    bool have_base = false;
    for (int step = 0; step < 8; ++step) {
      const int n = static_cast<int>(rng() % 4);
      a.transfers(n);
      b.transfers(n);
      switch (rng() % 4) {
        case 0:
          w->snapshot(SnapshotMode::complete);
          have_base = true;
          break;
        case 1:
          if (have_base) w->snapshot(SnapshotMode::incremental);
          break;
        case 2:
          w->compact_journal();
          break;
        default:
          break;
      }
    }
    ASSERT_EQ(bank::testing::business_state(*w), bank::testing::business_state(*replay));
    const std::string expected = w->state_bytes();
    w.bank.reset();
    World again(dir.path(), clock);
    ASSERT_EQ(again->state_bytes(), expected) << "round " << round;
  }
}

}  // namespace
}  // namespace bank::persist
