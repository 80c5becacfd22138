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

#include "bank/backup.hpp"
#include "bank/bank.hpp"
#include "bank/journal.hpp"
#include "bank/recovery.hpp"
#include "harness.hpp"

namespace bank::persist {
namespace {

using bank::testing::error_of;
using bank::testing::TempDir;
using bank::testing::World;

Timestamp at_s(std::int64_t s) { return Timestamp{s * 1000}; }

struct FakeHooks {
  BackupHooks hooks() {
    return {[this](SnapshotMode m) {
              if (fail_snapshot) throw Error(ErrorCode::STORAGE_FAILURE, "disk");
              modes.push_back(m);
              return SnapshotInfo{modes.size(), m, std::nullopt, 0, {}, 0};
            },
            [this](const fs::path& p) {
              if (fail_offsite) throw Error(ErrorCode::TARGET_UNWRITABLE, p.string());
              ++offsite_calls;
            }};
  }

  std::vector<SnapshotMode> modes;
  int offsite_calls = 0;
  bool fail_snapshot = false;
  bool fail_offsite = false;
};

TEST(BackupSchedulerTest, IntervalArithmetic) {
  FakeHooks fake;
  BackupScheduler s({.interval_s = 60, .complete_every = 4}, fake.hooks());
  EXPECT_TRUE(s.tick(at_s(0)).snapshot);
  EXPECT_FALSE(s.tick(at_s(30)).snapshot);
  EXPECT_FALSE(s.tick(at_s(59)).snapshot);
  EXPECT_TRUE(s.tick(at_s(61)).snapshot);
  EXPECT_EQ(s.runs(), 2u);
  EXPECT_EQ(s.last_backup()->millis, 61'000);
}

TEST(BackupSchedulerTest, CompleteEveryFourth) {
  FakeHooks fake;
  BackupScheduler s({.interval_s = 1, .complete_every = 4}, fake.hooks());
  for (int t = 0; t < 8; ++t) s.tick(at_s(t));
  using M = SnapshotMode;
  EXPECT_EQ(fake.modes, (std::vector<M>{M::complete, M::incremental, M::incremental, M::incremental,
                                        M::complete, M::incremental, M::incremental,
                                        M::incremental}));
}

TEST(BackupSchedulerTest, FailedSnapshotRetriedNextTick) {
  FakeHooks fake;
  BackupScheduler s({.interval_s = 60, .complete_every = 4}, fake.hooks());
  fake.fail_snapshot = true;
  auto r = s.tick(at_s(0));
  EXPECT_TRUE(r.error);
  EXPECT_FALSE(r.snapshot);
  EXPECT_EQ(s.runs(), 0u);
  fake.fail_snapshot = false;
  r = s.tick(at_s(1));
  ASSERT_TRUE(r.snapshot);
  // The first successful run is still the complete one.
  EXPECT_EQ(r.snapshot->mode, SnapshotMode::complete);
}

TEST(BackupSchedulerTest, OffsiteFailureKeepsLocalBackup) {
  FakeHooks fake;
  fake.fail_offsite = true;
  BackupScheduler s({.interval_s = 60, .complete_every = 4, .offsite_target = "/nowhere"},
                    fake.hooks());
  auto r = s.tick(at_s(0));
  EXPECT_TRUE(r.snapshot);
  EXPECT_TRUE(r.offsite_error);
  EXPECT_EQ(s.runs(), 1u);
  fake.fail_offsite = false;
  r = s.tick(at_s(60));
  EXPECT_FALSE(r.offsite_error);
  EXPECT_EQ(fake.offsite_calls, 1);
}

TEST(BackupSchedulerTest, ConfigValidation) {
  EXPECT_EQ(error_of([] { validate({.interval_s = 0}); }), ErrorCode::CONFIG_INVALID);
  EXPECT_EQ(error_of([] { validate({.interval_s = 10, .complete_every = 0}); }),
            ErrorCode::CONFIG_INVALID);
  EXPECT_FALSE(error_of([] { validate({}); }));
}

TEST(BackupSchedulerTest, RealBankWithMissingOffsiteTarget) {
  TempDir dir;
  World w(dir.path());
  w.add_customer("alice", {bank::testing::current(100)});
  const fs::path blocker = dir / "not-a-dir";
  std::ofstream(blocker) << "x";
  BackupScheduler s({.interval_s = 60, .complete_every = 4, .offsite_target = blocker / "copy"},
                    {[&](SnapshotMode m) { return w->snapshot(m); },
                     [&](const fs::path& p) { w->offsite_copy(p); }});
  auto r = s.tick(w->now());
  ASSERT_TRUE(r.snapshot);
  EXPECT_TRUE(r.offsite_error);
  EXPECT_EQ(SnapshotStore(dir / kSnapshotDir).list().size(), 1u);
}

// ------------------------------------------------------------------ offsite

TEST(OffsiteTest, CopyVerifiesAndRecoversIdentically) {
  TempDir dir, target;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  std::string expected;
  {
    World w(dir.path(), clock);
    w.add_customer("alice", {bank::testing::current(5'000), bank::testing::saving(10)});
    w->snapshot(SnapshotMode::complete);
    w.add_customer("bob", {bank::testing::current(7)});
    std::ofstream(dir / "bank.conf") << "{}";
    auto report = w->offsite_copy(target.path());
    EXPECT_GE(report.files.size(), 4u);
    expected = w->state_bytes();
  }
  EXPECT_TRUE(fs::exists(target / "bank.conf"));
  EXPECT_FALSE(error_of([&] { verify_offsite(target.path()); }));
  World restored(target.path(), clock);
  EXPECT_EQ(restored->state_bytes(), expected);
}

TEST(OffsiteTest, CorruptCopyFailsVerification) {
  TempDir dir, target;
  World w(dir.path());
  w.add_customer("alice", {bank::testing::current(5'000)});
  w->offsite_copy(target.path());
  {
    std::ofstream out(target / kJournalFile, std::ios::binary | std::ios::app);
    out << "x";
  }
  EXPECT_EQ(error_of([&] { verify_offsite(target.path()); }), ErrorCode::VERIFY_FAILED);
  fs::remove(target / kJournalFile);
  EXPECT_EQ(error_of([&] { verify_offsite(target.path()); }), ErrorCode::VERIFY_FAILED);
}

TEST(OffsiteTest, MissingManifestFailsVerification) {
  TempDir target;
  EXPECT_EQ(error_of([&] { verify_offsite(target.path()); }), ErrorCode::VERIFY_FAILED);
}

TEST(OffsiteTest, UnwritableTarget) {
  TempDir dir;
  World w(dir.path());
  const fs::path blocker = dir / "blocker";
  std::ofstream(blocker) << "x";
  EXPECT_EQ(error_of([&] { w->offsite_copy(blocker / "sub"); }), ErrorCode::TARGET_UNWRITABLE);
  EXPECT_EQ(error_of([&] { w->offsite_copy(dir.path()); }), ErrorCode::TARGET_UNWRITABLE);
}

// ----------------------------------------------------------------- recovery

TEST(RecoveryTest, EmptyDataDirRecoversEmpty) {
  TempDir dir;
  auto plan = plan_recovery(dir / "fresh");
  EXPECT_EQ(plan.report.events, 0u);
  EXPECT_FALSE(plan.base_state);
}

TEST(RecoveryTest, TornFinalRecordDropsOnlyLastOperation) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  std::string before_last;
  {
    World w(dir.path(), clock);
    w.add_customer("alice", {bank::testing::current(100)});
    before_last = bank::testing::business_state(*w);
    w.add_customer("bob", {bank::testing::current(200)});
  }
  const auto size = fs::file_size(dir / kJournalFile);
  fs::resize_file(dir / kJournalFile, size - 3);
  World again(dir.path(), clock);
  EXPECT_EQ(again->recovery_report().discarded_tail, 1u);
  EXPECT_EQ(bank::testing::business_state(*again), before_last);
  EXPECT_EQ(again->identity().find_credential("bob"), nullptr);
}

TEST(RecoveryTest, FlippedByteMidJournalIsFatal) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  {
    World w(dir.path(), clock);
    for (int i = 0; i < 9; ++i) w.add_customer("user" + std::to_string(i), {bank::testing::current(1)});
  }
  auto scan = scan_journal(dir / kJournalFile);
  ASSERT_GE(scan.records.size(), 10u);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < 4; ++i)
    offset += kRecordHeaderBytes + scan.records[i].payload.size() + kRecordTrailerBytes;
  {
    std::fstream f(dir / kJournalFile, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(static_cast<std::streamoff>(offset + kRecordHeaderBytes + 1));
    f.put('\x7f');
  }
  EXPECT_EQ(error_of([&] { World again(dir.path(), clock); }), ErrorCode::CORRUPT_JOURNAL);
}

TEST(RecoveryTest, ReadOnlyOpenRefusesMutations) {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(bank::testing::start_time());
  { World w(dir.path(), clock); }
  auto o = bank::testing::test_options(clock, dir.path());
  o.read_only = true;
  Bank ro(o);
  EXPECT_EQ(error_of([&] { ro.login(bank::testing::kAdminUser, bank::testing::kAdminPassword); }),
            std::nullopt);
  EXPECT_EQ(error_of([&] { ro.run_value_date(Date::of(clock->now())); }),
            ErrorCode::STORAGE_FAILURE);
}

}  // namespace
}  // namespace bank::persist
