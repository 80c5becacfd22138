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

#include "bank/codec.hpp"

#include <zlib.h>

namespace bank {

void Encoder::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void Encoder::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void Encoder::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.append(s);
}

void Decoder::need(std::size_t n) const {
  if (in_.size() - pos_ < n) throw DecodeError("truncated input");
}

std::uint8_t Decoder::u8() {
  need(1);
  return static_cast<std::uint8_t>(in_[pos_++]);
}

std::uint32_t Decoder::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(in_[pos_ + i])) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t Decoder::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(in_[pos_ + i])) << (8 * i);
  pos_ += 8;
  return v;
}

bool Decoder::boolean() {
  const auto b = u8();
  if (b > 1) throw DecodeError("bad boolean");
  return b == 1;
}

std::string Decoder::str() {
  const std::uint32_t n = u32();
  need(n);
  std::string s(in_.substr(pos_, n));
  pos_ += n;
  return s;
}

void Decoder::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes");
}

void put(Encoder& e, const Money& v) {
  e.i64(v.amount_minor);
  e.raw(v.currency.code());
}

void get(Decoder& d, Money& v) {
  v.amount_minor = d.i64();
  std::string code(3, '\0');
  for (auto& c : code) c = static_cast<char>(d.u8());
  auto cur = Currency::parse(code);
  if (!cur) throw DecodeError("bad currency");
  v.currency = *cur;
}

void put(Encoder& e, Timestamp v) { e.i64(v.millis); }
void get(Decoder& d, Timestamp& v) { v.millis = d.i64(); }
void put(Encoder& e, Date v) { e.i32(v.days); }
void get(Decoder& d, Date& v) { v.days = d.i32(); }
void put(Encoder& e, const std::string& v) { e.str(v); }
void get(Decoder& d, std::string& v) { v = d.str(); }
void put(Encoder& e, bool v) { e.boolean(v); }
void get(Decoder& d, bool& v) { v = d.boolean(); }
void put(Encoder& e, std::uint32_t v) { e.u32(v); }
void get(Decoder& d, std::uint32_t& v) { v = d.u32(); }

namespace {

// Writes/reads every listed member in order.
template <class... Ts>
void put_all(Encoder& e, const Ts&... xs) {
  (put(e, xs), ...);
}
template <class... Ts>
void get_all(Decoder& d, Ts&... xs) {
  (get(d, xs), ...);
}

void put(Encoder& e, const Currency& c) { e.raw(c.code()); }
void get(Decoder& d, Currency& c) {
  std::string code(3, '\0');
  for (auto& ch : code) ch = static_cast<char>(d.u8());
  auto cur = Currency::parse(code);
  if (!cur) throw DecodeError("bad currency");
  c = *cur;
}

}  // namespace

void put(Encoder& e, const Account& v) {
  put_all(e, v.id, v.owner, v.kind, v.status, v.opened_at, v.credit_limit);
  put(e, v.currency);
}
void get(Decoder& d, Account& v) {
  get_all(d, v.id, v.owner, v.kind, v.status, v.opened_at, v.credit_limit);
  get(d, v.currency);
}

void put(Encoder& e, const Posting& v) { put_all(e, v.account, v.amount, v.ordinal); }
void get(Decoder& d, Posting& v) { get_all(d, v.account, v.amount, v.ordinal); }

void put(Encoder& e, const LedgerEntry& v) {
  put_all(e, v.id, v.posted_at, v.kind, v.description, v.postings);
}
void get(Decoder& d, LedgerEntry& v) {
  get_all(d, v.id, v.posted_at, v.kind, v.description, v.postings);
}

void put(Encoder& e, const StatementRequest& v) {
  put_all(e, v.id, v.account, v.channel, v.requested_at, v.status);
}
void get(Decoder& d, StatementRequest& v) {
  get_all(d, v.id, v.account, v.channel, v.requested_at, v.status);
}

void put(Encoder& e, const Customer& v) {
  put_all(e, v.id, v.full_name, v.ic_passport_no, v.email, v.postal_address, v.phone,
          v.secure_delivery_contact, v.atm_enabled, v.status);
}
void get(Decoder& d, Customer& v) {
  get_all(d, v.id, v.full_name, v.ic_passport_no, v.email, v.postal_address, v.phone,
          v.secure_delivery_contact, v.atm_enabled, v.status);
}

void put(Encoder& e, const Credential& v) {
  put_all(e, v.username, v.customer, v.salt, v.digest, v.iterations, v.password_set_at,
          v.failed_attempts, v.locked, v.must_change, v.is_admin);
}
void get(Decoder& d, Credential& v) {
  get_all(d, v.username, v.customer, v.salt, v.digest, v.iterations, v.password_set_at,
          v.failed_attempts, v.locked, v.must_change, v.is_admin);
}

void put(Encoder& e, const Beneficiary& v) {
  put_all(e, v.id, v.owner, v.account_no, v.nickname, v.created_at);
}
void get(Decoder& d, Beneficiary& v) {
  get_all(d, v.id, v.owner, v.account_no, v.nickname, v.created_at);
}

void put(Encoder& e, const TransferTarget& v) {
  put_all(e, v.kind, v.account, v.beneficiary, v.account_no);
}
void get(Decoder& d, TransferTarget& v) {
  get_all(d, v.kind, v.account, v.beneficiary, v.account_no);
}

void put(Encoder& e, const TransferInstruction& v) {
  put_all(e, v.id, v.owner, v.source, v.target, v.amount, v.effective_date, v.status,
          v.notify_email, v.created_at, v.executed_entry, v.failure_reason, v.settled_at);
}
void get(Decoder& d, TransferInstruction& v) {
  get_all(d, v.id, v.owner, v.source, v.target, v.amount, v.effective_date, v.status,
          v.notify_email, v.created_at, v.executed_entry, v.failure_reason, v.settled_at);
}

void put(Encoder& e, const BillerRegistration& v) {
  put_all(e, v.id, v.owner, v.corporation, v.bill_account_no, v.holder_name, v.status,
          v.created_at);
}
void get(Decoder& d, BillerRegistration& v) {
  get_all(d, v.id, v.owner, v.corporation, v.bill_account_no, v.holder_name, v.status,
          v.created_at);
}

void put(Encoder& e, const BillPayment& v) {
  put_all(e, v.id, v.owner, v.payer, v.corporation, v.bill_account_no, v.holder_name, v.amount,
          v.bill_ref, v.effective_date, v.status, v.registration, v.created_at,
          v.executed_entry, v.failure_reason, v.settled_at);
}
void get(Decoder& d, BillPayment& v) {
  get_all(d, v.id, v.owner, v.payer, v.corporation, v.bill_account_no, v.holder_name, v.amount,
          v.bill_ref, v.effective_date, v.status, v.registration, v.created_at,
          v.executed_entry, v.failure_reason, v.settled_at);
}

void put(Encoder& e, const Cheque& v) {
  put_all(e, v.account, v.cheque_no, v.status, v.status_changed_at, v.paid_entry);
}
void get(Decoder& d, Cheque& v) {
  get_all(d, v.account, v.cheque_no, v.status, v.status_changed_at, v.paid_entry);
}

void put(Encoder& e, const ChequeBookRequest& v) {
  put_all(e, v.id, v.account, v.leaves, v.requested_at, v.status, v.first_cheque_no);
}
void get(Decoder& d, ChequeBookRequest& v) {
  get_all(d, v.id, v.account, v.leaves, v.requested_at, v.status, v.first_cheque_no);
}

std::uint32_t crc32(std::string_view data, std::uint32_t seed) {
  uLong crc = seed;
  const auto* p = reinterpret_cast<const Bytef*>(data.data());
  std::size_t left = data.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace bank
