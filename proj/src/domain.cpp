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

#include "bank/domain.hpp"

namespace bank {

std::string_view to_string(AccountKind v) {
  switch (v) {
    case AccountKind::current: return "current";
    case AccountKind::saving: return "saving";
    case AccountKind::credit_card: return "credit_card";
    case AccountKind::clearing: return "clearing";
  }
  return "?";
}

std::string_view to_string(AccountStatus v) {
  return v == AccountStatus::active ? "active" : "closed";
}

std::string_view to_string(EntryKind v) {
  switch (v) {
    case EntryKind::transfer: return "transfer";
    case EntryKind::bill_payment: return "bill_payment";
    case EntryKind::cheque: return "cheque";
    case EntryKind::deposit: return "deposit";
    case EntryKind::adjustment: return "adjustment";
  }
  return "?";
}

std::string_view to_string(StatementChannel v) {
  switch (v) {
    case StatementChannel::online: return "online";
    case StatementChannel::email: return "email";
    case StatementChannel::post: return "post";
  }
  return "?";
}

std::string_view to_string(StatementStatus v) {
  return v == StatementStatus::queued ? "queued" : "fulfilled";
}

std::string_view to_string(CustomerStatus v) {
  return v == CustomerStatus::active ? "active" : "cancelled";
}

std::string_view to_string(InstructionStatus v) {
  switch (v) {
    case InstructionStatus::pending: return "pending";
    case InstructionStatus::executed: return "executed";
    case InstructionStatus::failed: return "failed";
    case InstructionStatus::cancelled: return "cancelled";
  }
  return "?";
}

std::string_view to_string(RegistrationStatus v) {
  return v == RegistrationStatus::active ? "active" : "removed";
}

std::string_view to_string(ChequeStatus v) {
  switch (v) {
    case ChequeStatus::unpaid: return "unpaid";
    case ChequeStatus::paid: return "paid";
    case ChequeStatus::stopped: return "stopped";
    case ChequeStatus::returned: return "returned";
  }
  return "?";
}

std::string_view to_string(ChequeBookStatus v) {
  return v == ChequeBookStatus::queued ? "queued" : "dispatched";
}

std::optional<AccountKind> parse_account_kind(std::string_view s) {
  if (s == "current") return AccountKind::current;
  if (s == "saving") return AccountKind::saving;
  if (s == "credit_card") return AccountKind::credit_card;
  return std::nullopt;
}

std::optional<StatementChannel> parse_statement_channel(std::string_view s) {
  if (s == "online") return StatementChannel::online;
  if (s == "email") return StatementChannel::email;
  if (s == "post") return StatementChannel::post;
  return std::nullopt;
}

}  // namespace bank
