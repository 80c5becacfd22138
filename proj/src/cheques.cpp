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

#include "bank/cheques.hpp"

#include <algorithm>
#include <cstdio>

#include "bank/codec.hpp"

namespace bank {

std::string format_cheque_no(std::uint64_t serial) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(serial));
  return buf;
}

Cheques::Cheques(EventBus& bus, Ledger& ledger) : bus_(bus), ledger_(ledger) {
  bus_.subscribe([this](const Event& ev) { apply(ev); });
}

void Cheques::check_owner(const Actor& who, AccountId account) const {
  if (ledger_.account(account).owner != who.customer) fail(ErrorCode::NOT_OWNER);
}

const Cheque& Cheques::find(AccountId account, std::string_view cheque_no) const {
  auto it = cheques_.find(Key{account, std::string(cheque_no)});
  if (it == cheques_.end()) fail(ErrorCode::UNKNOWN_CHEQUE);
  return it->second;
}

Cheque Cheques::cheque_status(const Actor& who, AccountId account,
                              std::string_view cheque_no) const {
  check_owner(who, account);
  return find(account, cheque_no);
}

Cheque Cheques::stop_cheque(const Actor& who, AccountId account, std::string_view cheque_no) {
  check_owner(who, account);
  Cheque c = find(account, cheque_no);
  if (c.status == ChequeStatus::paid) fail(ErrorCode::ALREADY_PAID);
  if (c.status != ChequeStatus::unpaid) fail(ErrorCode::ALREADY_TERMINAL);
  bus_.commit({ChequeStatusChanged{account, c.cheque_no, ChequeStatus::stopped, std::nullopt,
                                   who.now}});
  return find(account, cheque_no);
}

ChequeBookRequest Cheques::request_cheque_book(const Actor& who, AccountId account,
                                               std::uint32_t leaves) {
  check_owner(who, account);
  if (ledger_.account(account).kind != AccountKind::current)
    fail(ErrorCode::NOT_CURRENT_ACCOUNT);
  if (std::find(std::begin(kAllowedLeaves), std::end(kAllowedLeaves), leaves) ==
      std::end(kAllowedLeaves))
    fail(ErrorCode::INVALID_LEAVES);
  ChequeBookRequest r;
  r.id = RequestId{next_request_};
  r.account = account;
  r.leaves = leaves;
  r.requested_at = who.now;
  r.status = ChequeBookStatus::queued;
  bus_.commit({ChequeBookRequested{r}});
  return r;
}

ChequeBookRequest Cheques::dispatch_cheque_book(RequestId request, Timestamp now) {
  auto it = requests_.find(request);
  if (it == requests_.end()) fail(ErrorCode::UNKNOWN_REQUEST);
  if (it->second.status != ChequeBookStatus::queued) fail(ErrorCode::NOT_PENDING);
  auto serial = next_serial_.find(it->second.account);
  const std::uint64_t first = serial == next_serial_.end() ? 1 : serial->second;
  bus_.commit({ChequeBookDispatched{request, first, now}});
  return requests_.at(request);
}

Cheque Cheques::present_cheque(AccountId account, std::string_view cheque_no, Money amount,
                               Timestamp now) {
  const Cheque c = find(account, cheque_no);
  if (c.status == ChequeStatus::stopped) fail(ErrorCode::CHEQUE_STOPPED);
  if (c.status == ChequeStatus::paid) fail(ErrorCode::ALREADY_PAID);
  if (c.status != ChequeStatus::unpaid) fail(ErrorCode::ALREADY_TERMINAL);
  if (!amount.positive()) fail(ErrorCode::NON_POSITIVE_AMOUNT);

  EntryDraft draft;
  draft.kind = EntryKind::cheque;
  draft.description = "Cheque " + c.cheque_no;
  draft.legs = {{account, -amount}, {kClearingAccount, amount}};
  auto batch = ledger_.batch();
  try {
    auto posted = batch.post(draft, now);
    const EntryId entry = posted.entry.id;
    bus_.commit({std::move(posted),
                 ChequeStatusChanged{account, c.cheque_no, ChequeStatus::paid, entry, now}});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::INSUFFICIENT_FUNDS && e.code() != ErrorCode::ACCOUNT_CLOSED &&
        e.code() != ErrorCode::OVER_LIMIT)
      throw;
    bus_.commit(
        {ChequeStatusChanged{account, c.cheque_no, ChequeStatus::returned, std::nullopt, now}});
  }
  return find(account, cheque_no);
}

std::vector<Cheque> Cheques::cheques_of(AccountId account) const {
  std::vector<Cheque> out;
  for (auto it = cheques_.lower_bound(Key{account, ""});
       it != cheques_.end() && it->first.first == account; ++it)
    out.push_back(it->second);
  return out;
}

void Cheques::apply(const Event& ev) {
  if (auto* r = std::get_if<ChequeBookRequested>(&ev)) {
    requests_[r->request.id] = r->request;
    next_request_ = std::max(next_request_, r->request.id.value + 1);
  } else if (auto* d = std::get_if<ChequeBookDispatched>(&ev)) {
    auto it = requests_.find(d->request);
    if (it == requests_.end()) return;
    ChequeBookRequest& req = it->second;
    req.status = ChequeBookStatus::dispatched;
    req.first_cheque_no = format_cheque_no(d->first_no);
    for (std::uint64_t n = d->first_no; n < d->first_no + req.leaves; ++n) {
      Cheque c{req.account, format_cheque_no(n), ChequeStatus::unpaid, d->at, std::nullopt};
      cheques_[Key{req.account, c.cheque_no}] = c;
    }
    auto& next = next_serial_[req.account];
    next = std::max(next, d->first_no + req.leaves);
  } else if (auto* s = std::get_if<ChequeStatusChanged>(&ev)) {
    auto it = cheques_.find(Key{s->account, s->cheque_no});
    if (it == cheques_.end()) return;
    it->second.status = s->status;
    it->second.status_changed_at = s->at;
    it->second.paid_entry = s->entry;
  }
}

void Cheques::encode_state(Encoder& e) const {
  e.u64(next_request_);
  e.u32(static_cast<std::uint32_t>(requests_.size()));
  for (const auto& [id, r] : requests_) put(e, r);
  e.u32(static_cast<std::uint32_t>(cheques_.size()));
  for (const auto& [k, c] : cheques_) put(e, c);
  e.u32(static_cast<std::uint32_t>(next_serial_.size()));
  for (const auto& [a, n] : next_serial_) {
    put(e, a);
    e.u64(n);
  }
}

void Cheques::decode_state(Decoder& d) {
  requests_.clear();
  cheques_.clear();
  next_serial_.clear();
  next_request_ = d.u64();
  for (std::uint32_t i = 0, n = d.u32(); i < n; ++i) {
    ChequeBookRequest r;
    get(d, r);
    requests_[r.id] = r;
  }
  for (std::uint32_t i = 0, n = d.u32(); i < n; ++i) {
    Cheque c;
    get(d, c);
    cheques_[Key{c.account, c.cheque_no}] = c;
  }
  for (std::uint32_t i = 0, n = d.u32(); i < n; ++i) {
    AccountId a;
    get(d, a);
    next_serial_[a] = d.u64();
  }
}

}  // namespace bank
