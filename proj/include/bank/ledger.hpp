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

#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "bank/domain.hpp"
#include "bank/events.hpp"

namespace bank {

class Encoder;
class Decoder;

/// Customer-visible history never reaches further back than this.
inline constexpr std::int32_t kHistoryRetentionDays = 90;

struct HistoryItem {
  LedgerEntry entry;
  Money net;  // this account's share of the entry
};

struct StatementResult {
  StatementRequest request;
  std::optional<std::vector<HistoryItem>> body;  // online channel only
};

/// Accounts and the double-entry journal of postings. Balances are derived
/// from postings; nothing else stores money.
///
/// Not internally synchronized: the owning Bank serializes writers.
class Ledger {
 public:
  /// Validates drafts against committed state plus everything staged in it.
  class Batch {
   public:
    explicit Batch(const Ledger& ledger);

    AccountOpened open_account(CustomerId owner, AccountKind kind, Money credit_limit,
                               Timestamp now);
    EntryPosted post(const EntryDraft& draft, Timestamp now);
    /// Derived balance as it would be after everything staged so far.
    Money balance(AccountId id) const;

   private:
    const Account& account(AccountId id) const;
    std::int64_t raw(AccountId id) const;

    const Ledger& ledger_;
    std::unordered_map<AccountId, Account> new_accounts_;
    std::unordered_map<AccountId, std::int64_t> delta_;
    std::uint64_t next_account_;
    std::uint64_t next_entry_;
  };

  explicit Ledger(EventBus& bus);

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  AccountId open_account(CustomerId owner, AccountKind kind, Money credit_limit, Timestamp now);
  EntryId post_entry(const EntryDraft& draft, Timestamp now);
  StatementResult request_statement(AccountId id, StatementChannel channel, Timestamp now);

  /// Current/saving: funds held. Credit card: amount owed. Clearing: raw sum.
  Money balance(AccountId id) const;
  /// Signed sum of all postings to the account (credits positive).
  std::int64_t posted_sum(AccountId id) const;
  /// Entries touching the account inside [max(from, now-90d), min(to, now)],
  /// newest first.
  std::vector<HistoryItem> history(AccountId id, Date from, Date to, Timestamp now) const;

  const Account& account(AccountId id) const;
  const Account* find_account(AccountId id) const;
  std::vector<Account> accounts_of(CustomerId owner) const;
  const std::map<AccountId, Account>& accounts() const { return accounts_; }
  const LedgerEntry* find_entry(EntryId id) const;
  std::span<const LedgerEntry> entries() const { return entries_; }
  const std::vector<StatementRequest>& statements() const { return statements_; }

  Batch batch() const { return Batch(*this); }

  void apply(const Event& ev);
  void encode_state(Encoder& e) const;
  void decode_state(Decoder& d);

 private:
  void insert_clearing();

  EventBus& bus_;
  std::map<AccountId, Account> accounts_;
  std::vector<LedgerEntry> entries_;  // entries_[i].id == i + 1
  std::unordered_map<AccountId, std::int64_t> sums_;
  std::unordered_map<AccountId, std::vector<std::size_t>> by_account_;
  std::vector<StatementRequest> statements_;
  std::uint64_t next_account_ = kClearingAccount.value + 1;
};

}  // namespace bank
