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

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bank/domain.hpp"
#include "bank/events.hpp"
#include "bank/ledger.hpp"

namespace bank {

class Encoder;
class Decoder;

struct PaymentsConfig {
  std::int64_t tac_ttl_s = 300;
  std::size_t max_beneficiaries = 10;
};

struct Tac {
  std::string code;
  std::string session_token;
  Timestamp issued_at;
  std::int64_t ttl_s = 300;
  bool used = false;
};

/// Who is acting, and when. Resolved from a live session by the caller.
struct Actor {
  CustomerId customer;
  std::string token;
  Timestamp now;

  Date today() const { return Date::of(now); }
};

struct TransferRequest {
  AccountId source;
  TransferTarget target;  // kind + account or beneficiary; account_no is filled in
  Money amount;
  Date effective_date;
  std::string tac;
  std::optional<std::string> notify_email;
};

struct BillRequest {
  AccountId payer;
  Money amount;
  std::optional<std::string> bill_ref;
  Date effective_date;
};

struct Notification {
  InstructionId instruction;
  std::string email;
  std::string text;
};

struct ExecutionReport {
  Date business_date;
  bool already_processed = false;
  std::vector<InstructionId> executed;
  std::vector<InstructionId> failed;
  std::vector<Notification> notifications;
};

/// Outbound mail hook for transfer notifications; the default drops them.
using NotificationSink = std::function<void(const Notification&)>;

/// Transfers, the beneficiary book, bill payments and the value-date run.
/// Not internally synchronized (except the TAC table); Bank serializes writers.
class Payments {
 public:
  Payments(EventBus& bus, Ledger& ledger, PaymentsConfig config = {});

  Payments(const Payments&) = delete;
  Payments& operator=(const Payments&) = delete;

  std::string issue_tac(std::string_view token, Timestamp now);
  void discard_tacs(std::string_view token);

  Beneficiary save_beneficiary(const Actor& who, std::string_view account_no,
                               std::string_view nickname);
  Beneficiary update_beneficiary(const Actor& who, BeneficiaryId id,
                                 std::optional<std::string> account_no,
                                 std::optional<std::string> nickname);
  void delete_beneficiary(const Actor& who, BeneficiaryId id);
  std::vector<Beneficiary> list_beneficiaries(CustomerId owner) const;

  TransferInstruction create_transfer(const Actor& who, TransferRequest req);
  std::vector<TransferInstruction> pending_transfers(CustomerId owner) const;
  void cancel_pending_transfer(const Actor& who, InstructionId id);
  std::vector<TransferInstruction> transfer_history(CustomerId owner, Date from, Date to,
                                                    Timestamp now) const;

  BillerRegistration register_biller(const Actor& who, std::string_view corporation,
                                     std::string_view bill_account_no,
                                     std::string_view holder_name);
  void deregister_billers(const Actor& who, const std::vector<RegistrationId>& ids);
  std::vector<BillerRegistration> registrations(CustomerId owner) const;

  BillPayment pay_registered(const Actor& who, RegistrationId registration, BillRequest req);
  BillPayment open_payment(const Actor& who, std::string_view corporation,
                           std::string_view bill_account_no, std::string_view holder_name,
                           BillRequest req);
  std::vector<BillPayment> enquire_future_payments(CustomerId owner) const;
  void cancel_future_payment(const Actor& who, InstructionId id);
  std::vector<BillPayment> bill_payment_history(CustomerId owner, Date from, Date to,
                                                Timestamp now) const;

  /// Up to ten corporations by executed payment count, ties alphabetical.
  std::vector<std::string> top_ten_payees() const;

  ExecutionReport run_value_date(Date business_date, Timestamp now);
  std::optional<Date> last_processed() const { return last_processed_; }

  const TransferInstruction* find_transfer(InstructionId id) const;
  const BillPayment* find_payment(InstructionId id) const;
  const std::map<InstructionId, TransferInstruction>& transfers() const { return transfers_; }
  const std::map<InstructionId, BillPayment>& payments() const { return payments_; }

  void set_notification_sink(NotificationSink sink) { notify_ = std::move(sink); }

  void apply(const Event& ev);
  void encode_state(Encoder& e) const;
  void decode_state(Decoder& d);

 private:
  const Account& owned_account(CustomerId owner, AccountId id) const;
  void check_tac(std::string_view token, std::string_view code, Timestamp now) const;
  void mark_tac_used(std::string_view token, std::string_view code);
  EntryDraft transfer_draft(const TransferInstruction& t) const;
  EntryDraft payment_draft(const BillPayment& p) const;
  BillPayment submit_payment(const Actor& who, BillPayment p);
  InstructionId next_instruction() const { return InstructionId{next_instruction_}; }

  EventBus& bus_;
  Ledger& ledger_;
  PaymentsConfig config_;
  NotificationSink notify_;

  std::map<BeneficiaryId, Beneficiary> beneficiaries_;
  std::map<InstructionId, TransferInstruction> transfers_;
  std::map<InstructionId, BillPayment> payments_;
  std::map<RegistrationId, BillerRegistration> registrations_;
  std::optional<Date> last_processed_;
  std::uint64_t next_beneficiary_ = 1;
  std::uint64_t next_instruction_ = 1;
  std::uint64_t next_registration_ = 1;

  mutable std::mutex tac_mu_;
  std::unordered_map<std::string, std::vector<Tac>> tacs_;
};

}  // namespace bank
