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

#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bank/bank.hpp"
#include "bank/error.hpp"

namespace bank::testing {

inline constexpr const char* kAdminUser = "admin";
inline constexpr const char* kAdminPassword = "Admin#Pass01";
inline constexpr const char* kPassword = "Secret#123";

/// 2026-03-02 09:00:00 UTC
inline Timestamp start_time() { return {Date::from_ymd(2026, 3, 2).start().millis + 9 * 3'600'000}; }

/// Removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Cheap digests so suites stay fast; everything else at defaults.
BankOptions test_options(std::shared_ptr<ManualClock> clock,
                         std::optional<std::filesystem::path> data_dir = std::nullopt);

struct Customer {
  CustomerId id;
  std::string username;
  std::string token;
  std::vector<AccountId> accounts;
};

/// A bank on a virtual clock with a logged-in administrator.
class World {
 public:
  explicit World(std::optional<std::filesystem::path> data_dir = std::nullopt,
                 std::shared_ptr<ManualClock> clock = nullptr,
                 const std::function<void(BankOptions&)>& tweak = {});

  /// Seeds a customer (no forced password change) and logs them in.
  Customer add_customer(const std::string& username, const std::vector<AccountSpec>& accounts);
  std::string login(const std::string& username, const std::string& password = kPassword);
  /// Re-authenticates the administrator after clock jumps.
  const std::string& admin();

  Bank& operator*() { return *bank; }
  Bank* operator->() { return bank.get(); }

  std::shared_ptr<ManualClock> clock;
  std::unique_ptr<Bank> bank;

 private:
  std::string admin_token_;
};

AccountSpec current(std::int64_t opening);
AccountSpec saving(std::int64_t opening);
AccountSpec card(std::int64_t limit, std::int64_t owed = 0);

/// Ledger, payments and cheque state. Unlike Bank::state_bytes it carries no
/// password salts, so two banks fed the same operations compare equal.
std::string business_state(const Bank& bank);

inline Money myr(std::int64_t minor) { return Money{minor, kDefaultCurrency}; }

/// Runs `fn` and returns the error code it threw, or nullopt.
template <class Fn>
std::optional<ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace bank::testing
