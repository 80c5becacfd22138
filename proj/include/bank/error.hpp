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

#include <stdexcept>
#include <string>
#include <string_view>

namespace bank {

// X(name, http_status). The names are part of the wire contract; keep them stable.
#define BANK_ERROR_CODES(X)          \
  X(UNBALANCED, 422)                 \
  X(INSUFFICIENT_FUNDS, 409)         \
  X(ACCOUNT_CLOSED, 409)             \
  X(CURRENCY_MISMATCH, 422)          \
  X(OVER_LIMIT, 409)                 \
  X(UNKNOWN_ACCOUNT, 404)            \
  X(INVALID_RANGE, 400)              \
  X(INVALID_CHANNEL, 422)            \
  X(INVALID_CREDENTIALS, 401)        \
  X(LOCKED, 423)                     \
  X(CUSTOMER_CANCELLED, 403)         \
  X(UNAUTHENTICATED, 401)            \
  X(SESSION_EXPIRED, 440)            \
  X(PASSWORD_CHANGE_REQUIRED, 403)   \
  X(IC_MISMATCH, 403)                \
  X(POLICY_VIOLATION, 422)           \
  X(INVALID_FIELD, 422)              \
  X(ALREADY_CANCELLED, 409)          \
  X(NOT_ADMIN, 403)                  \
  X(UNKNOWN_USER, 404)               \
  X(DUPLICATE_USERNAME, 409)         \
  X(UNKNOWN_CUSTOMER, 404)           \
  X(INVALID_TAC, 403)                \
  X(LIMIT_EXCEEDED, 409)             \
  X(DUPLICATE_BENEFICIARY, 409)      \
  X(UNKNOWN_BENEFICIARY, 404)        \
  X(SAME_ACCOUNT, 422)               \
  X(NON_POSITIVE_AMOUNT, 422)        \
  X(PAST_DATE, 422)                  \
  X(NOT_OWNER, 403)                  \
  X(NOT_PENDING, 409)                \
  X(UNKNOWN_TRANSFER, 404)           \
  X(UNKNOWN_REGISTRATION, 404)       \
  X(DUPLICATE_REGISTRATION, 409)     \
  X(UNKNOWN_PAYMENT, 404)            \
  X(DATE_REGRESSION, 409)            \
  X(UNKNOWN_CHEQUE, 404)             \
  X(UNKNOWN_REQUEST, 404)            \
  X(ALREADY_PAID, 409)               \
  X(ALREADY_TERMINAL, 409)           \
  X(NOT_CURRENT_ACCOUNT, 422)        \
  X(INVALID_LEAVES, 422)             \
  X(CHEQUE_STOPPED, 409)             \
  X(STORAGE_FAILURE, 503)            \
  X(NO_BASE, 409)                    \
  X(CORRUPT_JOURNAL, 500)            \
  X(CORRUPT_SNAPSHOT, 500)           \
  X(TARGET_UNWRITABLE, 500)          \
  X(VERIFY_FAILED, 500)              \
  X(UNKNOWN_ROUTE, 404)              \
  X(SCHEMA_VIOLATION, 422)           \
  X(CONFIG_INVALID, 500)             \
  X(INTERNAL, 500)

enum class ErrorCode {
#define BANK_ENUM_ENTRY(name, status) name,
  BANK_ERROR_CODES(BANK_ENUM_ENTRY)
#undef BANK_ENUM_ENTRY
};

std::string_view to_string(ErrorCode code) noexcept;
int http_status(ErrorCode code) noexcept;

/// Every failed banking operation throws this. The code is machine-stable;
/// the message is for humans and, where mandated, byte-exact.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  explicit Error(ErrorCode code) : Error(code, std::string(to_string(code))) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code) { throw Error(code); }
[[noreturn]] inline void fail(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

}  // namespace bank
