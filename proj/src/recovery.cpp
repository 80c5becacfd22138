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

#include "bank/recovery.hpp"

#include "bank/error.hpp"

namespace bank::persist {

namespace {

struct Chain {
  std::string base_state;
  std::vector<SnapshotInfo> links;
  std::vector<JournalRecord> records;  // from incrementals
  std::uint64_t upto = 0;
};

std::optional<Chain> load_chain(const SnapshotStore& store, const std::vector<SnapshotInfo>& all,
                                const SnapshotInfo& root, std::vector<std::string>& warnings) {
  Chain c;
  try {
    c.base_state = store.read_payload(root);
  } catch (const Error& e) {
    warnings.push_back(e.what());
    return std::nullopt;
  }
  c.links.push_back(root);
  c.upto = root.upto_seq;
  for (;;) {
    const SnapshotInfo* next = nullptr;
    for (const auto& s : all)
      if (s.mode == SnapshotMode::incremental && s.base_id == c.links.back().id) {
        next = &s;
        break;
      }
    if (!next) break;
    std::vector<JournalRecord> recs;
    try {
      recs = decode_record_batch(store.read_payload(*next));
    } catch (const Error& e) {
      warnings.push_back(e.what());
      break;
    } catch (const std::exception& e) {
      warnings.push_back("snapshot " + std::to_string(next->id) + ": " + e.what());
      break;
    }
    bool contiguous = next->upto_seq >= c.upto;
    std::uint64_t expect = c.upto + 1;
    for (const auto& r : recs) contiguous = contiguous && r.seq == expect++;
    if (!contiguous || expect - 1 != next->upto_seq) {
      warnings.push_back("snapshot " + std::to_string(next->id) + ": records do not continue chain");
      break;
    }
    for (auto& r : recs) c.records.push_back(std::move(r));
    c.links.push_back(*next);
    c.upto = next->upto_seq;
  }
  return c;
}

}  // namespace

RecoveryPlan plan_recovery(const fs::path& data_dir) {
  RecoveryPlan plan;
  JournalScan scan = scan_journal(data_dir / kJournalFile);
  plan.report.discarded_tail = scan.discarded_tail;
  plan.report.valid_journal_bytes = scan.valid_bytes;
  if (scan.discarded_tail)
    plan.report.warnings.push_back("discarded torn journal tail of " +
                                   std::to_string(scan.discarded_bytes) + " bytes");

  const SnapshotStore store(data_dir / kSnapshotDir);
  const auto all = store.list();

  auto journal_continues = [&](std::uint64_t upto) {
    return scan.records.empty() || scan.records.front().seq <= upto + 1;
  };

  bool any_complete = false;
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    if (it->mode != SnapshotMode::complete) continue;
    any_complete = true;
    auto chain = load_chain(store, all, *it, plan.report.warnings);
    if (!chain) continue;
    // The journal may have been compacted past the chain's end.
    if (!journal_continues(chain->upto)) {
      plan.report.warnings.push_back("snapshot " + std::to_string(it->id) +
                                     ": journal does not continue from seq " +
                                     std::to_string(chain->upto));
      continue;
    }
    plan.base_state = std::move(chain->base_state);
    plan.records = std::move(chain->records);
    for (auto& r : scan.records)
      if (r.seq > chain->upto) plan.records.push_back(std::move(r));
    plan.chain = std::move(chain->links);
    plan.report.snapshot_id = plan.chain.back().id;
    break;
  }

  if (!plan.base_state) {
    if (!scan.records.empty() && scan.records.front().seq != 1) {
      if (any_complete)
        fail(ErrorCode::CORRUPT_SNAPSHOT, "no usable snapshot and the journal starts at seq " +
                                              std::to_string(scan.records.front().seq));
      fail(ErrorCode::CORRUPT_JOURNAL,
           "journal starts at seq " + std::to_string(scan.records.front().seq));
    }
    plan.records = std::move(scan.records);
  }

  plan.report.events = plan.records.size();
  if (!plan.records.empty())
    plan.report.last_seq = plan.records.back().seq;
  else if (!plan.chain.empty())
    plan.report.last_seq = plan.chain.back().upto_seq;
  return plan;
}

}  // namespace bank::persist
