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

#include "bank/events.hpp"

#include "bank/codec.hpp"

namespace bank {

namespace {

void put(Encoder& e, std::uint64_t v) { e.u64(v); }
void get(Decoder& d, std::uint64_t& v) { v = d.u64(); }
using bank::get;
using bank::put;

template <class... Ts>
void put_all(Encoder& e, const Ts&... xs) {
  (put(e, xs), ...);
}
template <class... Ts>
void get_all(Decoder& d, Ts&... xs) {
  (get(d, xs), ...);
}

// Field layout per event. The variant index is the on-disk tag, so new
// alternatives must only ever be appended.
template <class F>
void fields(AccountOpened& v, F&& f) { f(v.account); }
template <class F>
void fields(EntryPosted& v, F&& f) { f(v.entry); }
template <class F>
void fields(StatementRequested& v, F&& f) { f(v.request); }
template <class F>
void fields(CustomerAdded& v, F&& f) { f(v.customer, v.credential); }
template <class F>
void fields(CustomerCancelled& v, F&& f) { f(v.customer); }
template <class F>
void fields(CredentialCounterSet& v, F&& f) { f(v.username, v.failed_attempts, v.locked); }
template <class F>
void fields(PasswordChanged& v, F&& f) { f(v.username, v.salt, v.digest, v.iterations, v.set_at); }
template <class F>
void fields(ProfileUpdated& v, F&& f) {
  f(v.customer, v.email, v.postal_address, v.phone, v.secure_delivery_contact);
}
template <class F>
void fields(AtmCancelled& v, F&& f) { f(v.customer); }
template <class F>
void fields(BeneficiarySaved& v, F&& f) { f(v.beneficiary); }
template <class F>
void fields(BeneficiaryUpdated& v, F&& f) { f(v.id, v.account_no, v.nickname); }
template <class F>
void fields(BeneficiaryDeleted& v, F&& f) { f(v.id); }
template <class F>
void fields(TransferRecorded& v, F&& f) { f(v.transfer); }
template <class F>
void fields(BillPaymentRecorded& v, F&& f) { f(v.payment); }
template <class F>
void fields(InstructionSettled& v, F&& f) {
  f(v.kind, v.id, v.status, v.entry, v.failure_reason, v.at);
}
template <class F>
void fields(BillerRegistered& v, F&& f) { f(v.registration); }
template <class F>
void fields(BillersDeregistered& v, F&& f) { f(v.ids); }
template <class F>
void fields(ValueDateProcessed& v, F&& f) { f(v.date); }
template <class F>
void fields(ChequeBookRequested& v, F&& f) { f(v.request); }
template <class F>
void fields(ChequeBookDispatched& v, F&& f) { f(v.request, v.first_no, v.at); }
template <class F>
void fields(ChequeStatusChanged& v, F&& f) { f(v.account, v.cheque_no, v.status, v.entry, v.at); }

template <std::size_t I = 0>
Event make_alternative(std::size_t index) {
  if constexpr (I < std::variant_size_v<Event>) {
    if (index == I) return Event{std::in_place_index<I>};
    return make_alternative<I + 1>(index);
  } else {
    throw DecodeError("unknown event tag");
  }
}

}  // namespace

std::string encode_command(const Command& cmd) {
  Encoder e;
  e.u32(static_cast<std::uint32_t>(cmd.size()));
  for (const Event& ev : cmd) {
    e.u8(static_cast<std::uint8_t>(ev.index()));
    std::visit(
        [&](const auto& alt) {
          auto& mut = const_cast<std::remove_cvref_t<decltype(alt)>&>(alt);
          fields(mut, [&](const auto&... xs) { put_all(e, xs...); });
        },
        ev);
  }
  return e.take();
}

Command decode_command(std::string_view bytes) {
  Decoder d(bytes);
  const std::uint32_t n = d.u32();
  Command cmd;
  for (std::uint32_t i = 0; i < n; ++i) {
    Event ev = make_alternative(d.u8());
    std::visit([&](auto& alt) { fields(alt, [&](auto&... xs) { get_all(d, xs...); }); }, ev);
    cmd.push_back(std::move(ev));
  }
  d.expect_done();
  return cmd;
}

void EventBus::commit(const Command& cmd) {
  if (pre_commit_) pre_commit_(cmd);
  replay(cmd);
}

void EventBus::replay(const Command& cmd) const {
  for (const Event& ev : cmd)
    for (const auto& h : handlers_) h(ev);
}

}  // namespace bank
