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

#include "bank/payments.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "bank/codec.hpp"
#include "bank/crypto.hpp"

namespace bank {

namespace {

// Ledger rejections that turn an instruction into status=failed rather
// than aborting the whole operation.
bool is_execution_failure(ErrorCode c) {
  switch (c) {
    case ErrorCode::INSUFFICIENT_FUNDS:
    case ErrorCode::OVER_LIMIT:
    case ErrorCode::ACCOUNT_CLOSED:
    case ErrorCode::CURRENCY_MISMATCH:
    case ErrorCode::UNKNOWN_ACCOUNT:
      return true;
    default:
      return false;
  }
}

struct Window {
  Timestamp lo, hi;
  bool contains(Timestamp t) const { return t >= lo && t <= hi; }
};

// Same customer-view clamp as account history.
Window history_window(Date from, Date to, Timestamp now) {
  if (from > to) fail(ErrorCode::INVALID_RANGE);
  const Timestamp floor{now.millis - std::int64_t{kHistoryRetentionDays} * kMillisPerDay};
  return {std::max(from.start(), floor), std::min(Timestamp{(to + 1).start().millis - 1}, now)};
}

void require_text(std::string_view v, const char* field) {
  if (v.empty()) fail(ErrorCode::INVALID_FIELD, std::string(field) + " is required");
}

}  // namespace

Payments::Payments(EventBus& bus, Ledger& ledger, PaymentsConfig config)
    : bus_(bus), ledger_(ledger), config_(config) {
  if (config_.tac_ttl_s <= 0) fail(ErrorCode::CONFIG_INVALID, "tac_ttl_s");
  bus_.subscribe([this](const Event& ev) { apply(ev); });
}

const Account& Payments::owned_account(CustomerId owner, AccountId id) const {
  const Account& a = ledger_.account(id);
  if (a.owner != owner) fail(ErrorCode::NOT_OWNER);
  return a;
}

// ------------------------------------------------------------------ TAC

std::string Payments::issue_tac(std::string_view token, Timestamp now) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06u", crypto::random_below(1'000'000));
  Tac tac{buf, std::string(token), now, config_.tac_ttl_s, false};
  std::lock_guard lock(tac_mu_);
  auto& list = tacs_[tac.session_token];
  std::erase_if(list, [&](const Tac& t) {
    return t.used || now.millis - t.issued_at.millis > t.ttl_s * 1000;
  });
  list.push_back(tac);
  return tac.code;
}

void Payments::discard_tacs(std::string_view token) {
  std::lock_guard lock(tac_mu_);
  tacs_.erase(std::string(token));
}

void Payments::check_tac(std::string_view token, std::string_view code, Timestamp now) const {
  std::lock_guard lock(tac_mu_);
  auto it = tacs_.find(std::string(token));
  if (it != tacs_.end()) {
    for (const Tac& t : it->second) {
      if (t.used || !crypto::equal(t.code, code)) continue;
      if (now.millis - t.issued_at.millis > t.ttl_s * 1000) continue;
      return;
    }
  }
  fail(ErrorCode::INVALID_TAC);
}

void Payments::mark_tac_used(std::string_view token, std::string_view code) {
  std::lock_guard lock(tac_mu_);
  auto it = tacs_.find(std::string(token));
  if (it == tacs_.end()) return;
  for (Tac& t : it->second)
    if (!t.used && t.code == code) {
      t.used = true;
      return;
    }
}

// --------------------------------------------------------- beneficiaries

Beneficiary Payments::save_beneficiary(const Actor& who, std::string_view account_no,
                                       std::string_view nickname) {
  require_text(account_no, "account_no");
  std::size_t count = 0;
  for (const auto& [id, b] : beneficiaries_) {
    if (b.owner != who.customer) continue;
    ++count;
    if (b.account_no == account_no) fail(ErrorCode::DUPLICATE_BENEFICIARY);
  }
  if (count >= config_.max_beneficiaries) fail(ErrorCode::LIMIT_EXCEEDED);
  Beneficiary b{BeneficiaryId{next_beneficiary_}, who.customer, std::string(account_no),
                std::string(nickname), who.now};
  bus_.commit({BeneficiarySaved{b}});
  return b;
}

Beneficiary Payments::update_beneficiary(const Actor& who, BeneficiaryId id,
                                         std::optional<std::string> account_no,
                                         std::optional<std::string> nickname) {
  auto it = beneficiaries_.find(id);
  if (it == beneficiaries_.end() || it->second.owner != who.customer)
    fail(ErrorCode::UNKNOWN_BENEFICIARY);
  Beneficiary next = it->second;
  if (account_no) {
    require_text(*account_no, "account_no");
    for (const auto& [oid, b] : beneficiaries_)
      if (oid != id && b.owner == who.customer && b.account_no == *account_no)
        fail(ErrorCode::DUPLICATE_BENEFICIARY);
    next.account_no = *account_no;
  }
  if (nickname) next.nickname = *nickname;
  bus_.commit({BeneficiaryUpdated{id, next.account_no, next.nickname}});
  return next;
}

void Payments::delete_beneficiary(const Actor& who, BeneficiaryId id) {
  auto it = beneficiaries_.find(id);
  if (it == beneficiaries_.end() || it->second.owner != who.customer)
    fail(ErrorCode::UNKNOWN_BENEFICIARY);
  bus_.commit({BeneficiaryDeleted{id}});
}

std::vector<Beneficiary> Payments::list_beneficiaries(CustomerId owner) const {
  std::vector<Beneficiary> out;
  for (const auto& [id, b] : beneficiaries_)
    if (b.owner == owner) out.push_back(b);
  std::stable_sort(out.begin(), out.end(), [](const Beneficiary& a, const Beneficiary& b) {
    return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
  });
  return out;
}

// -------------------------------------------------------------- transfers

EntryDraft Payments::transfer_draft(const TransferInstruction& t) const {
  EntryDraft d;
  d.kind = EntryKind::transfer;
  const AccountId credit =
      t.target.kind == TransferTarget::Kind::own_account ? t.target.account : kClearingAccount;
  d.description = t.target.kind == TransferTarget::Kind::own_account
                      ? "Transfer to account " + t.target.account.str()
                      : "Transfer to " + t.target.account_no;
  d.legs = {{t.source, -t.amount}, {credit, t.amount}};
  return d;
}

TransferInstruction Payments::create_transfer(const Actor& who, TransferRequest req) {
  const Date today = who.today();
  if (!req.amount.positive()) fail(ErrorCode::NON_POSITIVE_AMOUNT);
  if (req.effective_date < today) fail(ErrorCode::PAST_DATE);
  const Account& source = owned_account(who.customer, req.source);
  if (source.currency != req.amount.currency) fail(ErrorCode::CURRENCY_MISMATCH);

  if (req.target.kind == TransferTarget::Kind::own_account) {
    owned_account(who.customer, req.target.account);
    if (req.target.account == req.source) fail(ErrorCode::SAME_ACCOUNT);
    req.target.beneficiary = {};
    req.target.account_no = req.target.account.str();
  } else {
    auto it = beneficiaries_.find(req.target.beneficiary);
    if (it == beneficiaries_.end() || it->second.owner != who.customer)
      fail(ErrorCode::UNKNOWN_BENEFICIARY);
    req.target.account = {};
    req.target.account_no = it->second.account_no;
  }
  check_tac(who.token, req.tac, who.now);

  TransferInstruction t;
  t.id = next_instruction();
  t.owner = who.customer;
  t.source = req.source;
  t.target = req.target;
  t.amount = req.amount;
  t.effective_date = req.effective_date;
  t.notify_email = req.notify_email;
  t.created_at = who.now;

  if (req.effective_date > today) {
    t.status = InstructionStatus::pending;
    bus_.commit({TransferRecorded{t}});
    mark_tac_used(who.token, req.tac);
    return t;
  }

  auto batch = ledger_.batch();
  try {
    auto posted = batch.post(transfer_draft(t), who.now);
    t.status = InstructionStatus::executed;
    t.executed_entry = posted.entry.id;
    t.settled_at = who.now;
    bus_.commit({std::move(posted), TransferRecorded{t}});
    mark_tac_used(who.token, req.tac);
    return t;
  } catch (const Error& e) {
    if (!is_execution_failure(e.code())) throw;
    t.status = InstructionStatus::failed;
    t.failure_reason = std::string(to_string(e.code()));
    t.settled_at = who.now;
    bus_.commit({TransferRecorded{t}});
    mark_tac_used(who.token, req.tac);
    throw;
  }
}

std::vector<TransferInstruction> Payments::pending_transfers(CustomerId owner) const {
  std::vector<TransferInstruction> out;
  for (const auto& [id, t] : transfers_)
    if (t.owner == owner && t.status == InstructionStatus::pending) out.push_back(t);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.effective_date, a.id) < std::tie(b.effective_date, b.id);
  });
  return out;
}

void Payments::cancel_pending_transfer(const Actor& who, InstructionId id) {
  auto it = transfers_.find(id);
  if (it == transfers_.end() || it->second.owner != who.customer)
    fail(ErrorCode::UNKNOWN_TRANSFER);
  if (it->second.status != InstructionStatus::pending) fail(ErrorCode::NOT_PENDING);
  bus_.commit({InstructionSettled{InstructionKind::transfer, id, InstructionStatus::cancelled,
                                  std::nullopt, std::nullopt, who.now}});
}

std::vector<TransferInstruction> Payments::transfer_history(CustomerId owner, Date from, Date to,
                                                            Timestamp now) const {
  const Window w = history_window(from, to, now);
  std::vector<TransferInstruction> out;
  for (const auto& [id, t] : transfers_)
    if (t.owner == owner && t.status != InstructionStatus::pending && t.settled_at &&
        w.contains(*t.settled_at))
      out.push_back(t);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(*b.settled_at, b.id) < std::tie(*a.settled_at, a.id);
  });
  return out;
}

// ----------------------------------------------------------------- billers

BillerRegistration Payments::register_biller(const Actor& who, std::string_view corporation,
                                             std::string_view bill_account_no,
                                             std::string_view holder_name) {
  require_text(corporation, "corporation");
  require_text(bill_account_no, "bill_account_no");
  for (const auto& [id, r] : registrations_)
    if (r.owner == who.customer && r.status == RegistrationStatus::active &&
        r.corporation == corporation && r.bill_account_no == bill_account_no)
      fail(ErrorCode::DUPLICATE_REGISTRATION);
  BillerRegistration r{RegistrationId{next_registration_}, who.customer, std::string(corporation),
                       std::string(bill_account_no), std::string(holder_name),
                       RegistrationStatus::active, who.now};
  bus_.commit({BillerRegistered{r}});
  return r;
}

void Payments::deregister_billers(const Actor& who, const std::vector<RegistrationId>& ids) {
  if (ids.empty()) fail(ErrorCode::INVALID_FIELD, "no registrations selected");
  for (RegistrationId id : ids) {
    auto it = registrations_.find(id);
    if (it == registrations_.end() || it->second.owner != who.customer ||
        it->second.status != RegistrationStatus::active)
      fail(ErrorCode::UNKNOWN_REGISTRATION);
  }
  bus_.commit({BillersDeregistered{ids}});
}

std::vector<BillerRegistration> Payments::registrations(CustomerId owner) const {
  std::vector<BillerRegistration> out;
  for (const auto& [id, r] : registrations_)
    if (r.owner == owner && r.status == RegistrationStatus::active) out.push_back(r);
  return out;
}

// ----------------------------------------------------------- bill payments

EntryDraft Payments::payment_draft(const BillPayment& p) const {
  // Paying one's own card settles the card balance instead of leaving the bank.
  AccountId credit = kClearingAccount;
  for (const Account& a : ledger_.accounts_of(p.owner))
    if (a.kind == AccountKind::credit_card && a.id.str() == p.bill_account_no) credit = a.id;
  EntryDraft d;
  d.kind = EntryKind::bill_payment;
  d.description = "Bill payment to " + p.corporation + " (" + p.bill_account_no + ")";
  d.legs = {{p.payer, -p.amount}, {credit, p.amount}};
  return d;
}

BillPayment Payments::submit_payment(const Actor& who, BillPayment p) {
  const Date today = who.today();
  if (!p.amount.positive()) fail(ErrorCode::NON_POSITIVE_AMOUNT);
  if (p.effective_date < today) fail(ErrorCode::PAST_DATE);
  const Account& payer = owned_account(who.customer, p.payer);
  if (payer.currency != p.amount.currency) fail(ErrorCode::CURRENCY_MISMATCH);
  p.id = next_instruction();
  p.owner = who.customer;
  p.created_at = who.now;

  if (p.effective_date > today) {
    p.status = InstructionStatus::pending;
    bus_.commit({BillPaymentRecorded{p}});
    return p;
  }
  auto batch = ledger_.batch();
  try {
    auto posted = batch.post(payment_draft(p), who.now);
    p.status = InstructionStatus::executed;
    p.executed_entry = posted.entry.id;
    p.settled_at = who.now;
    bus_.commit({std::move(posted), BillPaymentRecorded{p}});
    return p;
  } catch (const Error& e) {
    if (!is_execution_failure(e.code())) throw;
    p.status = InstructionStatus::failed;
    p.failure_reason = std::string(to_string(e.code()));
    p.settled_at = who.now;
    bus_.commit({BillPaymentRecorded{p}});
    throw;
  }
}

BillPayment Payments::pay_registered(const Actor& who, RegistrationId registration,
                                     BillRequest req) {
  auto it = registrations_.find(registration);
  if (it == registrations_.end() || it->second.owner != who.customer ||
      it->second.status != RegistrationStatus::active)
    fail(ErrorCode::UNKNOWN_REGISTRATION);
  BillPayment p;
  p.payer = req.payer;
  p.corporation = it->second.corporation;
  p.bill_account_no = it->second.bill_account_no;
  p.holder_name = it->second.holder_name;
  p.amount = req.amount;
  p.bill_ref = req.bill_ref;
  p.effective_date = req.effective_date;
  p.registration = registration;
  return submit_payment(who, std::move(p));
}

BillPayment Payments::open_payment(const Actor& who, std::string_view corporation,
                                   std::string_view bill_account_no, std::string_view holder_name,
                                   BillRequest req) {
  require_text(corporation, "corporation");
  require_text(bill_account_no, "bill_account_no");
  BillPayment p;
  p.payer = req.payer;
  p.corporation = std::string(corporation);
  p.bill_account_no = std::string(bill_account_no);
  p.holder_name = std::string(holder_name);
  p.amount = req.amount;
  p.bill_ref = req.bill_ref;
  p.effective_date = req.effective_date;
  return submit_payment(who, std::move(p));
}

std::vector<BillPayment> Payments::enquire_future_payments(CustomerId owner) const {
  std::vector<BillPayment> out;
  for (const auto& [id, p] : payments_)
    if (p.owner == owner && p.status == InstructionStatus::pending) out.push_back(p);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.effective_date, a.id) < std::tie(b.effective_date, b.id);
  });
  return out;
}

void Payments::cancel_future_payment(const Actor& who, InstructionId id) {
  auto it = payments_.find(id);
  if (it == payments_.end() || it->second.owner != who.customer) fail(ErrorCode::UNKNOWN_PAYMENT);
  if (it->second.status != InstructionStatus::pending) fail(ErrorCode::NOT_PENDING);
  bus_.commit({InstructionSettled{InstructionKind::bill_payment, id, InstructionStatus::cancelled,
                                  std::nullopt, std::nullopt, who.now}});
}

std::vector<BillPayment> Payments::bill_payment_history(CustomerId owner, Date from, Date to,
                                                        Timestamp now) const {
  const Window w = history_window(from, to, now);
  std::vector<BillPayment> out;
  for (const auto& [id, p] : payments_)
    if (p.owner == owner && p.status != InstructionStatus::pending && p.settled_at &&
        w.contains(*p.settled_at))
      out.push_back(p);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(*b.settled_at, b.id) < std::tie(*a.settled_at, a.id);
  });
  return out;
}

std::vector<std::string> Payments::top_ten_payees() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& [id, p] : payments_)
    if (p.status == InstructionStatus::executed) ++counts[p.corporation];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < 10; ++i) out.push_back(ranked[i].first);
  return out;
}

// ------------------------------------------------------------- scheduler

ExecutionReport Payments::run_value_date(Date business_date, Timestamp now) {
  ExecutionReport report;
  report.business_date = business_date;
  if (last_processed_) {
    if (business_date < *last_processed_) fail(ErrorCode::DATE_REGRESSION);
    if (business_date == *last_processed_) {
      report.already_processed = true;
      return report;
    }
  }

  struct Due {
    Date date;
    InstructionId id;
    InstructionKind kind;
  };
  std::vector<Due> due;
  for (const auto& [id, t] : transfers_)
    if (t.status == InstructionStatus::pending && t.effective_date <= business_date)
      due.push_back({t.effective_date, id, InstructionKind::transfer});
  for (const auto& [id, p] : payments_)
    if (p.status == InstructionStatus::pending && p.effective_date <= business_date)
      due.push_back({p.effective_date, id, InstructionKind::bill_payment});
  std::sort(due.begin(), due.end(),
            [](const Due& a, const Due& b) { return std::tie(a.date, a.id) < std::tie(b.date, b.id); });

  Command cmd;
  auto batch = ledger_.batch();
  for (const Due& d : due) {
    const EntryDraft draft = d.kind == InstructionKind::transfer
                                 ? transfer_draft(transfers_.at(d.id))
                                 : payment_draft(payments_.at(d.id));
    InstructionSettled settled{d.kind, d.id, InstructionStatus::executed, std::nullopt,
                               std::nullopt, now};
    try {
      auto posted = batch.post(draft, now);
      settled.entry = posted.entry.id;
      cmd.emplace_back(std::move(posted));
      report.executed.push_back(d.id);
    } catch (const Error& e) {
      if (!is_execution_failure(e.code())) throw;
      settled.status = InstructionStatus::failed;
      settled.failure_reason = std::string(to_string(e.code()));
      report.failed.push_back(d.id);
    }
    if (d.kind == InstructionKind::transfer) {
      const auto& t = transfers_.at(d.id);
      if (t.notify_email)
        report.notifications.push_back(
            {d.id, *t.notify_email,
             "Transfer " + d.id.str() + " " + std::string(to_string(settled.status)) + ": " +
                 t.amount.to_string() + " to " + t.target.account_no});
    }
    cmd.emplace_back(std::move(settled));
  }
  cmd.emplace_back(ValueDateProcessed{business_date});
  bus_.commit(cmd);

  if (notify_)
    for (const auto& n : report.notifications) notify_(n);
  return report;
}

const TransferInstruction* Payments::find_transfer(InstructionId id) const {
  auto it = transfers_.find(id);
  return it == transfers_.end() ? nullptr : &it->second;
}

const BillPayment* Payments::find_payment(InstructionId id) const {
  auto it = payments_.find(id);
  return it == payments_.end() ? nullptr : &it->second;
}

// ------------------------------------------------------------------ state

void Payments::apply(const Event& ev) {
  if (auto* b = std::get_if<BeneficiarySaved>(&ev)) {
    beneficiaries_[b->beneficiary.id] = b->beneficiary;
    next_beneficiary_ = std::max(next_beneficiary_, b->beneficiary.id.value + 1);
  } else if (auto* u = std::get_if<BeneficiaryUpdated>(&ev)) {
    if (auto it = beneficiaries_.find(u->id); it != beneficiaries_.end()) {
      it->second.account_no = u->account_no;
      it->second.nickname = u->nickname;
    }
  } else if (auto* del = std::get_if<BeneficiaryDeleted>(&ev)) {
    beneficiaries_.erase(del->id);
  } else if (auto* t = std::get_if<TransferRecorded>(&ev)) {
    transfers_[t->transfer.id] = t->transfer;
    next_instruction_ = std::max(next_instruction_, t->transfer.id.value + 1);
  } else if (auto* p = std::get_if<BillPaymentRecorded>(&ev)) {
    payments_[p->payment.id] = p->payment;
    next_instruction_ = std::max(next_instruction_, p->payment.id.value + 1);
  } else if (auto* s = std::get_if<InstructionSettled>(&ev)) {
    auto settle = [&](auto& item) {
      item.status = s->status;
      item.executed_entry = s->entry;
      item.failure_reason = s->failure_reason;
      item.settled_at = s->at;
    };
    if (s->kind == InstructionKind::transfer) {
      if (auto it = transfers_.find(s->id); it != transfers_.end()) settle(it->second);
    } else if (auto it = payments_.find(s->id); it != payments_.end()) {
      settle(it->second);
    }
  } else if (auto* r = std::get_if<BillerRegistered>(&ev)) {
    registrations_[r->registration.id] = r->registration;
    next_registration_ = std::max(next_registration_, r->registration.id.value + 1);
  } else if (auto* dr = std::get_if<BillersDeregistered>(&ev)) {
    for (RegistrationId id : dr->ids)
      if (auto it = registrations_.find(id); it != registrations_.end())
        it->second.status = RegistrationStatus::removed;
  } else if (auto* v = std::get_if<ValueDateProcessed>(&ev)) {
    last_processed_ = v->date;
  }
}

namespace {

template <class K, class V>
void put_map(Encoder& e, const std::map<K, V>& m) {
  e.u32(static_cast<std::uint32_t>(m.size()));
  for (const auto& [k, v] : m) put(e, v);
}

template <class K, class V>
void get_map(Decoder& d, std::map<K, V>& m) {
  m.clear();
  for (std::uint32_t i = 0, n = d.u32(); i < n; ++i) {
    V v;
    get(d, v);
    m[v.id] = std::move(v);
  }
}

}  // namespace

void Payments::encode_state(Encoder& e) const {
  e.u64(next_beneficiary_);
  e.u64(next_instruction_);
  e.u64(next_registration_);
  put(e, last_processed_);
  put_map(e, beneficiaries_);
  put_map(e, transfers_);
  put_map(e, payments_);
  put_map(e, registrations_);
}

void Payments::decode_state(Decoder& d) {
  next_beneficiary_ = d.u64();
  next_instruction_ = d.u64();
  next_registration_ = d.u64();
  get(d, last_processed_);
  get_map(d, beneficiaries_);
  get_map(d, transfers_);
  get_map(d, payments_);
  get_map(d, registrations_);
}

}  // namespace bank
