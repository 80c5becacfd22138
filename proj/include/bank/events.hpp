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
#include <string>
#include <variant>
#include <vector>

#include "bank/domain.hpp"

namespace bank {

// State-mutating events. Each carries fully resolved values (ids, digests,
// timestamps) so that applying it is deterministic and cannot fail.

struct AccountOpened {
  Account account;
};

struct EntryPosted {
  LedgerEntry entry;
};

struct StatementRequested {
  StatementRequest request;
};

struct CustomerAdded {
  Customer customer;
  Credential credential;
};

/// Marks the customer cancelled and closes every account they own.
struct CustomerCancelled {
  CustomerId customer;
};

struct CredentialCounterSet {
  std::string username;
  std::uint32_t failed_attempts = 0;
  bool locked = false;
};

struct PasswordChanged {
  std::string username;
  std::string salt;
  std::string digest;
  std::uint32_t iterations = 0;
  Timestamp set_at;
};

struct ProfileUpdated {
  CustomerId customer;
  std::optional<std::string> email;
  std::optional<std::string> postal_address;
  std::optional<std::string> phone;
  std::optional<std::string> secure_delivery_contact;
};

struct AtmCancelled {
  CustomerId customer;
};

struct BeneficiarySaved {
  Beneficiary beneficiary;
};

struct BeneficiaryUpdated {
  BeneficiaryId id;
  std::string account_no;
  std::string nickname;
};

struct BeneficiaryDeleted {
  BeneficiaryId id;
};

struct TransferRecorded {
  TransferInstruction transfer;
};

struct BillPaymentRecorded {
  BillPayment payment;
};

enum class InstructionKind : std::uint8_t { transfer, bill_payment };

/// pending -> executed | failed | cancelled
struct InstructionSettled {
  InstructionKind kind = InstructionKind::transfer;
  InstructionId id;
  InstructionStatus status = InstructionStatus::executed;
  std::optional<EntryId> entry;
  std::optional<std::string> failure_reason;
  Timestamp at;
};

struct BillerRegistered {
  BillerRegistration registration;
};

struct BillersDeregistered {
  std::vector<RegistrationId> ids;
};

struct ValueDateProcessed {
  Date date;
};

struct ChequeBookRequested {
  ChequeBookRequest request;
};

/// Registers cheque numbers [first_no, first_no + leaves) as unpaid.
struct ChequeBookDispatched {
  RequestId request;
  std::uint64_t first_no = 0;
  Timestamp at;
};

struct ChequeStatusChanged {
  AccountId account;
  std::string cheque_no;
  ChequeStatus status = ChequeStatus::unpaid;
  std::optional<EntryId> entry;
  Timestamp at;
};

using Event = std::variant<AccountOpened, EntryPosted, StatementRequested, CustomerAdded,
                           CustomerCancelled, CredentialCounterSet, PasswordChanged,
                           ProfileUpdated, AtmCancelled, BeneficiarySaved, BeneficiaryUpdated,
                           BeneficiaryDeleted, TransferRecorded, BillPaymentRecorded,
                           InstructionSettled, BillerRegistered, BillersDeregistered,
                           ValueDateProcessed, ChequeBookRequested, ChequeBookDispatched,
                           ChequeStatusChanged>;

/// One business operation; journaled as a single record so it applies
/// all-or-nothing on recovery.
using Command = std::vector<Event>;

std::string encode_command(const Command& cmd);
/// Throws DecodeError.
Command decode_command(std::string_view bytes);

/// Routes committed commands to the modules that own the affected state.
/// A pre-commit hook (the journal) runs first; if it throws nothing applies.
class EventBus {
 public:
  using Handler = std::function<void(const Event&)>;
  using PreCommit = std::function<void(const Command&)>;

  void subscribe(Handler h) { handlers_.push_back(std::move(h)); }
  void set_pre_commit(PreCommit hook) { pre_commit_ = std::move(hook); }

  void commit(const Command& cmd);
  /// Applies without the pre-commit hook (recovery replay).
  void replay(const Command& cmd) const;

 private:
  std::vector<Handler> handlers_;
  PreCommit pre_commit_;
};

}  // namespace bank
