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

#include "bank/ledger.hpp"

#include <algorithm>

#include "bank/codec.hpp"

namespace bank {

namespace {

Money derived(const Account& a, std::int64_t raw) {
  if (a.kind == AccountKind::credit_card) return {-raw, a.currency};
  return {raw, a.currency};
}

// Applies the per-kind balance rules to a prospective raw sum.
void check_bounds(const Account& a, std::int64_t raw) {
  switch (a.kind) {
    case AccountKind::current:
    case AccountKind::saving:
      if (raw < 0) fail(ErrorCode::INSUFFICIENT_FUNDS);
      break;
    case AccountKind::credit_card: {
      const std::int64_t owed = -raw;
      if (owed < 0 || owed > a.credit_limit.amount_minor) fail(ErrorCode::OVER_LIMIT);
      break;
    }
    case AccountKind::clearing:
      break;
  }
}

}  // namespace

// ------------------------------------------------------------------ Batch

Ledger::Batch::Batch(const Ledger& ledger)
    : ledger_(ledger),
      next_account_(ledger.next_account_),
      next_entry_(ledger.entries_.size() + 1) {}

const Account& Ledger::Batch::account(AccountId id) const {
  if (auto it = new_accounts_.find(id); it != new_accounts_.end()) return it->second;
  return ledger_.account(id);
}

std::int64_t Ledger::Batch::raw(AccountId id) const {
  std::int64_t base = new_accounts_.contains(id) ? 0 : ledger_.posted_sum(id);
  if (auto it = delta_.find(id); it != delta_.end()) base = checked_add(base, it->second);
  return base;
}

Money Ledger::Batch::balance(AccountId id) const { return derived(account(id), raw(id)); }

AccountOpened Ledger::Batch::open_account(CustomerId owner, AccountKind kind,
                                          Money credit_limit, Timestamp now) {
  if (kind == AccountKind::clearing) fail(ErrorCode::INVALID_FIELD, "cannot open a clearing account");
  if (kind != AccountKind::credit_card) credit_limit = Money{0, credit_limit.currency};
  if (credit_limit.amount_minor < 0) fail(ErrorCode::INVALID_FIELD, "negative credit limit");
  Account a;
  a.id = AccountId{next_account_++};
  a.owner = owner;
  a.kind = kind;
  a.status = AccountStatus::active;
  a.opened_at = now;
  a.credit_limit = credit_limit;
  a.currency = credit_limit.currency;
  new_accounts_.emplace(a.id, a);
  return {a};
}

EntryPosted Ledger::Batch::post(const EntryDraft& draft, Timestamp now) {
  if (draft.legs.size() < 2) fail(ErrorCode::UNBALANCED, "an entry needs at least two postings");

  std::map<Currency, std::int64_t> per_currency;
  std::map<AccountId, std::int64_t> touched;
  for (const Leg& leg : draft.legs) {
    if (leg.amount.is_zero()) fail(ErrorCode::UNBALANCED, "zero posting");
    const Account& a = account(leg.account);
    if (a.status != AccountStatus::active) fail(ErrorCode::ACCOUNT_CLOSED);
    if (a.currency != leg.amount.currency) fail(ErrorCode::CURRENCY_MISMATCH);
    per_currency[leg.amount.currency] =
        checked_add(per_currency[leg.amount.currency], leg.amount.amount_minor);
    touched[leg.account] = checked_add(touched[leg.account], leg.amount.amount_minor);
  }
  for (const auto& [cur, sum] : per_currency)
    if (sum != 0) fail(ErrorCode::UNBALANCED);

  for (const auto& [id, d] : touched) check_bounds(account(id), checked_add(raw(id), d));
  for (const auto& [id, d] : touched) delta_[id] = checked_add(delta_[id], d);

  LedgerEntry e;
  e.id = EntryId{next_entry_++};
  e.posted_at = now;
  e.kind = draft.kind;
  e.description = draft.description;
  std::uint32_t ordinal = 0;
  for (const Leg& leg : draft.legs) e.postings.push_back({leg.account, leg.amount, ordinal++});
  return {std::move(e)};
}

// ----------------------------------------------------------------- Ledger

Ledger::Ledger(EventBus& bus) : bus_(bus) {
  insert_clearing();
  bus_.subscribe([this](const Event& ev) { apply(ev); });
}

void Ledger::insert_clearing() {
  Account clearing;
  clearing.id = kClearingAccount;
  clearing.owner = kBankCustomer;
  clearing.kind = AccountKind::clearing;
  accounts_[clearing.id] = clearing;
}

AccountId Ledger::open_account(CustomerId owner, AccountKind kind, Money credit_limit,
                               Timestamp now) {
  auto b = batch();
  auto ev = b.open_account(owner, kind, credit_limit, now);
  const AccountId id = ev.account.id;
  bus_.commit({std::move(ev)});
  return id;
}

EntryId Ledger::post_entry(const EntryDraft& draft, Timestamp now) {
  auto b = batch();
  auto ev = b.post(draft, now);
  const EntryId id = ev.entry.id;
  bus_.commit({std::move(ev)});
  return id;
}

StatementResult Ledger::request_statement(AccountId id, StatementChannel channel,
                                          Timestamp now) {
  account(id);
  if (static_cast<std::uint8_t>(channel) > static_cast<std::uint8_t>(StatementChannel::post))
    fail(ErrorCode::INVALID_CHANNEL);
  StatementRequest req;
  req.id = RequestId{statements_.size() + 1};
  req.account = id;
  req.channel = channel;
  req.requested_at = now;
  req.status =
      channel == StatementChannel::online ? StatementStatus::fulfilled : StatementStatus::queued;
  bus_.commit({StatementRequested{req}});

  StatementResult out{req, std::nullopt};
  if (channel == StatementChannel::online) {
    const Date today = Date::of(now);
    out.body = history(id, today - kHistoryRetentionDays, today, now);
  }
  return out;
}

const Account* Ledger::find_account(AccountId id) const {
  auto it = accounts_.find(id);
  return it == accounts_.end() ? nullptr : &it->second;
}

const Account& Ledger::account(AccountId id) const {
  const Account* a = find_account(id);
  if (!a) fail(ErrorCode::UNKNOWN_ACCOUNT);
  return *a;
}

std::vector<Account> Ledger::accounts_of(CustomerId owner) const {
  std::vector<Account> out;
  for (const auto& [id, a] : accounts_)
    if (a.owner == owner && a.kind != AccountKind::clearing) out.push_back(a);
  return out;
}

const LedgerEntry* Ledger::find_entry(EntryId id) const {
  if (id.value == 0 || id.value > entries_.size()) return nullptr;
  return &entries_[id.value - 1];
}

std::int64_t Ledger::posted_sum(AccountId id) const {
  account(id);
  auto it = sums_.find(id);
  return it == sums_.end() ? 0 : it->second;
}

Money Ledger::balance(AccountId id) const { return derived(account(id), posted_sum(id)); }

std::vector<HistoryItem> Ledger::history(AccountId id, Date from, Date to, Timestamp now) const {
  const Account& a = account(id);
  if (from > to) fail(ErrorCode::INVALID_RANGE);

  const Timestamp floor{now.millis - std::int64_t{kHistoryRetentionDays} * kMillisPerDay};
  const Timestamp lo = std::max(from.start(), floor);
  const Timestamp hi = std::min(Timestamp{(to + 1).start().millis - 1}, now);

  std::vector<HistoryItem> out;
  auto it = by_account_.find(id);
  if (it == by_account_.end() || lo > hi) return out;
  for (std::size_t idx : it->second) {
    const LedgerEntry& e = entries_[idx];
    if (e.posted_at < lo || e.posted_at > hi) continue;
    Money net{0, a.currency};
    for (const Posting& p : e.postings)
      if (p.account == id) net += p.amount;
    out.push_back({e, net});
  }
  // Virtual clocks may post out of time order, so order explicitly.
  std::sort(out.begin(), out.end(), [](const HistoryItem& x, const HistoryItem& y) {
    if (x.entry.posted_at != y.entry.posted_at) return x.entry.posted_at > y.entry.posted_at;
    return x.entry.id > y.entry.id;
  });
  return out;
}

void Ledger::apply(const Event& ev) {
  if (auto* o = std::get_if<AccountOpened>(&ev)) {
    accounts_[o->account.id] = o->account;
    next_account_ = std::max(next_account_, o->account.id.value + 1);
  } else if (auto* p = std::get_if<EntryPosted>(&ev)) {
    const std::size_t idx = entries_.size();
    entries_.push_back(p->entry);
    for (const Posting& post : p->entry.postings) {
      sums_[post.account] += post.amount.amount_minor;
      auto& list = by_account_[post.account];
      if (list.empty() || list.back() != idx) list.push_back(idx);
    }
  } else if (auto* s = std::get_if<StatementRequested>(&ev)) {
    statements_.push_back(s->request);
  } else if (auto* c = std::get_if<CustomerCancelled>(&ev)) {
    for (auto& [id, a] : accounts_)
      if (a.owner == c->customer) a.status = AccountStatus::closed;
  }
}

void Ledger::encode_state(Encoder& e) const {
  e.u64(next_account_);
  e.u32(static_cast<std::uint32_t>(accounts_.size()));
  for (const auto& [id, a] : accounts_) put(e, a);
  put(e, entries_);
  put(e, statements_);
}

void Ledger::decode_state(Decoder& d) {
  accounts_.clear();
  entries_.clear();
  sums_.clear();
  by_account_.clear();
  next_account_ = d.u64();
  const std::uint32_t n = d.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    Account a;
    get(d, a);
    accounts_[a.id] = a;
  }
  std::vector<LedgerEntry> entries;
  get(d, entries);
  for (auto& e : entries) apply(EntryPosted{std::move(e)});
  get(d, statements_);
}

}  // namespace bank
