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

#include "views.hpp"

#include <cstdio>

namespace bank::api {

namespace {

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class Tag>
Json opt_id(const std::optional<Id<Tag>>& v) {
  return v ? Json(id_str(*v)) : Json(nullptr);
}

Json opt_ts(const std::optional<Timestamp>& t) {
  return t ? Json(format_timestamp(*t)) : Json(nullptr);
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  const Date d = Date::of(t);
  const std::int64_t ms = t.millis - d.start().millis;
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d.%03dZ", static_cast<int>(ms / 3'600'000),
                static_cast<int>(ms / 60'000 % 60), static_cast<int>(ms / 1000 % 60),
                static_cast<int>(ms % 1000));
  return d.to_string() + buf;
}

Json to_json(const Money& m) {
  return {{"amount_minor", m.amount_minor}, {"currency", m.currency.str()}};
}

Json to_json(const AccountView& v) {
  const Account& a = v.account;
  Json j = {{"account_id", id_str(a.id)},
            {"kind", to_string(a.kind)},
            {"status", to_string(a.status)},
            {"opened_at", format_timestamp(a.opened_at)},
            {"currency", a.currency.str()},
            {"balance", to_json(v.balance)}};
  if (a.kind == AccountKind::credit_card) j["credit_limit"] = to_json(a.credit_limit);
  return j;
}

Json to_json(const HistoryItem& h) {
  return {{"entry_id", id_str(h.entry.id)},
          {"posted_at", format_timestamp(h.entry.posted_at)},
          {"kind", to_string(h.entry.kind)},
          {"description", h.entry.description},
          {"amount", to_json(h.net)}};
}

Json to_json(const StatementResult& s) {
  Json j = {{"request_id", id_str(s.request.id)},
            {"account_id", id_str(s.request.account)},
            {"channel", to_string(s.request.channel)},
            {"status", to_string(s.request.status)},
            {"requested_at", format_timestamp(s.request.requested_at)}};
  if (s.body) j["body"] = to_json(*s.body);
  return j;
}

Json to_json(const Customer& c) {
  return {{"customer_id", id_str(c.id)},
          {"full_name", c.full_name},
          {"email", c.email},
          {"postal_address", c.postal_address},
          {"phone", c.phone},
          {"secure_delivery_contact", c.secure_delivery_contact},
          {"atm_enabled", c.atm_enabled},
          {"status", to_string(c.status)}};
}

Json to_json(const Beneficiary& b) {
  return {{"beneficiary_id", id_str(b.id)},
          {"account_no", b.account_no},
          {"nickname", b.nickname},
          {"created_at", format_timestamp(b.created_at)}};
}

Json to_json(const TransferInstruction& t) {
  Json target = {{"kind", t.target.kind == TransferTarget::Kind::own_account ? "own_account"
                                                                             : "beneficiary"},
                 {"account_no", t.target.account_no}};
  if (t.target.kind == TransferTarget::Kind::own_account)
    target["account_id"] = id_str(t.target.account);
  else
    target["beneficiary_id"] = id_str(t.target.beneficiary);
  return {{"transfer_id", id_str(t.id)},
          {"source_account_id", id_str(t.source)},
          {"target", target},
          {"amount", to_json(t.amount)},
          {"effective_date", t.effective_date.to_string()},
          {"status", to_string(t.status)},
          {"notify_email", opt(t.notify_email)},
          {"created_at", format_timestamp(t.created_at)},
          {"settled_at", opt_ts(t.settled_at)},
          {"entry_id", opt_id(t.executed_entry)},
          {"failure_reason", opt(t.failure_reason)}};
}

Json to_json(const BillerRegistration& r) {
  return {{"registration_id", id_str(r.id)},
          {"corporation", r.corporation},
          {"bill_account_no", r.bill_account_no},
          {"holder_name", r.holder_name},
          {"status", to_string(r.status)},
          {"created_at", format_timestamp(r.created_at)}};
}

Json to_json(const BillPayment& p) {
  return {{"payment_id", id_str(p.id)},
          {"payer_account_id", id_str(p.payer)},
          {"corporation", p.corporation},
          {"bill_account_no", p.bill_account_no},
          {"holder_name", p.holder_name},
          {"amount", to_json(p.amount)},
          {"bill_ref", opt(p.bill_ref)},
          {"effective_date", p.effective_date.to_string()},
          {"status", to_string(p.status)},
          {"registration_id", opt_id(p.registration)},
          {"created_at", format_timestamp(p.created_at)},
          {"settled_at", opt_ts(p.settled_at)},
          {"entry_id", opt_id(p.executed_entry)},
          {"failure_reason", opt(p.failure_reason)}};
}

Json to_json(const Cheque& c) {
  return {{"account_id", id_str(c.account)},
          {"cheque_no", c.cheque_no},
          {"status", to_string(c.status)},
          {"status_changed_at", format_timestamp(c.status_changed_at)},
          {"entry_id", opt_id(c.paid_entry)}};
}

Json to_json(const ChequeBookRequest& r) {
  return {{"request_id", id_str(r.id)},
          {"account_id", id_str(r.account)},
          {"leaves", r.leaves},
          {"status", to_string(r.status)},
          {"requested_at", format_timestamp(r.requested_at)},
          {"first_cheque_no", opt(r.first_cheque_no)}};
}

Json to_json(const ExecutionReport& r) {
  Json executed = Json::array(), failed = Json::array(), notes = Json::array();
  for (auto id : r.executed) executed.push_back(id_str(id));
  for (auto id : r.failed) failed.push_back(id_str(id));
  for (const auto& n : r.notifications)
    notes.push_back({{"instruction_id", id_str(n.instruction)}, {"email", n.email}, {"text", n.text}});
  return {{"business_date", r.business_date.to_string()},
          {"already_processed", r.already_processed},
          {"executed", executed},
          {"failed", failed},
          {"notifications", notes}};
}

Json to_json(const LedgerEntry& e) {
  Json postings = Json::array();
  for (const auto& p : e.postings)
    postings.push_back({{"account_id", id_str(p.account)}, {"amount", to_json(p.amount)}});
  return {{"entry_id", id_str(e.id)},
          {"posted_at", format_timestamp(e.posted_at)},
          {"kind", to_string(e.kind)},
          {"description", e.description},
          {"postings", postings}};
}

Json to_json(const SessionMeta& m) {
  return {{"remaining_s", m.remaining_s}, {"warn", m.warn}};
}

}  // namespace bank::api
