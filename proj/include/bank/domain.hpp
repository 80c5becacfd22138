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

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bank/money.hpp"
#include "bank/time.hpp"

namespace bank {

/// Opaque integer identifier, distinct per domain concept.
template <class Tag>
struct Id {
  std::uint64_t value = 0;

  std::string str() const { return std::to_string(value); }
  friend constexpr auto operator<=>(Id, Id) = default;
};

using AccountId = Id<struct AccountTag>;
using CustomerId = Id<struct CustomerTag>;
using EntryId = Id<struct EntryTag>;
using RequestId = Id<struct RequestTag>;
using BeneficiaryId = Id<struct BeneficiaryTag>;
using RegistrationId = Id<struct RegistrationTag>;
/// Shared sequence for transfers and bill payments so the scheduler has a
/// single total order over (effective_date, id).
using InstructionId = Id<struct InstructionTag>;

/// The one internal account standing in for every external party.
inline constexpr AccountId kClearingAccount{1};
/// Owner of the clearing account.
inline constexpr CustomerId kBankCustomer{0};

// ---------------------------------------------------------------- ledger

enum class AccountKind : std::uint8_t { current, saving, credit_card, clearing };
enum class AccountStatus : std::uint8_t { active, closed };

struct Account {
  AccountId id;
  CustomerId owner;
  AccountKind kind = AccountKind::current;
  AccountStatus status = AccountStatus::active;
  Timestamp opened_at;
  Money credit_limit;  // credit_card only, zero otherwise
  Currency currency;
};

enum class EntryKind : std::uint8_t { transfer, bill_payment, cheque, deposit, adjustment };

/// Positive amount credits the account, negative debits it.
struct Posting {
  AccountId account;
  Money amount;
  std::uint32_t ordinal = 0;
};

struct LedgerEntry {
  EntryId id;
  Timestamp posted_at;
  EntryKind kind = EntryKind::transfer;
  std::string description;
  std::vector<Posting> postings;
};

struct Leg {
  AccountId account;
  Money amount;
};

struct EntryDraft {
  EntryKind kind = EntryKind::transfer;
  std::string description;
  std::vector<Leg> legs;
};

enum class StatementChannel : std::uint8_t { online, email, post };
enum class StatementStatus : std::uint8_t { queued, fulfilled };

struct StatementRequest {
  RequestId id;
  AccountId account;
  StatementChannel channel = StatementChannel::online;
  Timestamp requested_at;
  StatementStatus status = StatementStatus::queued;
};

// ------------------------------------------------------------- identity

enum class CustomerStatus : std::uint8_t { active, cancelled };

struct Customer {
  CustomerId id;
  std::string full_name;
  std::string ic_passport_no;
  std::string email;
  std::string postal_address;
  std::string phone;
  std::string secure_delivery_contact;
  bool atm_enabled = true;
  CustomerStatus status = CustomerStatus::active;
};

struct Credential {
  std::string username;
  CustomerId customer;
  std::string salt;    // raw bytes
  std::string digest;  // raw bytes
  std::uint32_t iterations = 0;
  Timestamp password_set_at;
  std::uint32_t failed_attempts = 0;
  bool locked = false;
  bool must_change = false;
  bool is_admin = false;
};

// ------------------------------------------------------------- payments

struct Beneficiary {
  BeneficiaryId id;
  CustomerId owner;
  std::string account_no;
  std::string nickname;
  Timestamp created_at;
};

enum class InstructionStatus : std::uint8_t { pending, executed, failed, cancelled };

struct TransferTarget {
  enum class Kind : std::uint8_t { own_account, beneficiary };
  Kind kind = Kind::own_account;
  AccountId account;          // own_account
  BeneficiaryId beneficiary;  // beneficiary
  std::string account_no;     // beneficiary account number captured at creation
};

struct TransferInstruction {
  InstructionId id;
  CustomerId owner;
  AccountId source;
  TransferTarget target;
  Money amount;
  Date effective_date;
  InstructionStatus status = InstructionStatus::pending;
  std::optional<std::string> notify_email;
  Timestamp created_at;
  std::optional<EntryId> executed_entry;
  std::optional<std::string> failure_reason;
  std::optional<Timestamp> settled_at;
};

enum class RegistrationStatus : std::uint8_t { active, removed };

struct BillerRegistration {
  RegistrationId id;
  CustomerId owner;
  std::string corporation;
  std::string bill_account_no;
  std::string holder_name;
  RegistrationStatus status = RegistrationStatus::active;
  Timestamp created_at;
};

struct BillPayment {
  InstructionId id;
  CustomerId owner;
  AccountId payer;
  std::string corporation;
  std::string bill_account_no;
  std::string holder_name;
  Money amount;
  std::optional<std::string> bill_ref;
  Date effective_date;
  InstructionStatus status = InstructionStatus::pending;
  std::optional<RegistrationId> registration;
  Timestamp created_at;
  std::optional<EntryId> executed_entry;
  std::optional<std::string> failure_reason;
  std::optional<Timestamp> settled_at;
};

// -------------------------------------------------------------- cheques

enum class ChequeStatus : std::uint8_t { unpaid, paid, stopped, returned };

struct Cheque {
  AccountId account;
  std::string cheque_no;
  ChequeStatus status = ChequeStatus::unpaid;
  Timestamp status_changed_at;
  std::optional<EntryId> paid_entry;
};

enum class ChequeBookStatus : std::uint8_t { queued, dispatched };

struct ChequeBookRequest {
  RequestId id;
  AccountId account;
  std::uint32_t leaves = 25;
  Timestamp requested_at;
  ChequeBookStatus status = ChequeBookStatus::queued;
  std::optional<std::string> first_cheque_no;
};

// ------------------------------------------------------- enum <-> text

std::string_view to_string(AccountKind v);
std::string_view to_string(AccountStatus v);
std::string_view to_string(EntryKind v);
std::string_view to_string(StatementChannel v);
std::string_view to_string(StatementStatus v);
std::string_view to_string(CustomerStatus v);
std::string_view to_string(InstructionStatus v);
std::string_view to_string(RegistrationStatus v);
std::string_view to_string(ChequeStatus v);
std::string_view to_string(ChequeBookStatus v);

std::optional<AccountKind> parse_account_kind(std::string_view s);
std::optional<StatementChannel> parse_statement_channel(std::string_view s);

}  // namespace bank

template <class Tag>
struct std::hash<bank::Id<Tag>> {
  std::size_t operator()(bank::Id<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
