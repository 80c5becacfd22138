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

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bank/domain.hpp"
#include "bank/events.hpp"

namespace bank {

class Encoder;
class Decoder;

inline constexpr std::string_view kWelcomeMessage =
    "welcome to the internet banking system please click on the left menu bar to choose your "
    "option!";
inline constexpr std::string_view kInvalidLoginMessage = "Alert Invalid Username and Password";
inline constexpr std::string_view kLoggedOutMessage = "You have been logged out successfully";
inline constexpr std::string_view kLockedMessage =
    "Access denied after too many failed log-on attempts. Please contact the Bank to have your "
    "access re-initialized.";

struct PasswordPolicy {
  /// Permitted special characters, verbatim (the repeated '&' included).
  static constexpr std::string_view kSpecialChars = R"chars(!@#%&^&*()_+=[{}|\:;'",<.>/?)chars";

  std::size_t min_length = 8;
  bool require_special = true;
  std::optional<std::int32_t> max_age_days = 90;  // nullopt disables forced rotation
  std::uint32_t max_failed_attempts = 3;
};

enum class PolicyRule : std::uint8_t { min_length, require_special, allowed_characters };

std::string_view to_string(PolicyRule r);

/// Pure function of (policy, candidate). Empty result means accepted.
std::vector<PolicyRule> check_password(const PasswordPolicy& policy, std::string_view candidate);

struct IdentityConfig {
  PasswordPolicy policy;
  std::int64_t idle_timeout_s = 300;
  std::uint32_t digest_iterations = 100'000;
};

struct Session {
  static constexpr std::int64_t kWarningWindowS = 30;

  std::string token;
  CustomerId customer;
  std::string username;
  Timestamp created_at;
  Timestamp last_activity_at;
  std::int64_t idle_timeout_s = 300;
  bool must_change = false;
  bool is_admin = false;
};

struct SessionMeta {
  std::int64_t remaining_s = 0;
  bool warn = false;
};

struct LoginResult {
  Session session;
  std::string message;
  bool must_change = false;
};

struct CustomerDraft {
  std::string full_name;
  std::string ic_passport_no;
  std::string email;
  std::string postal_address;
  std::string phone;
  std::string secure_delivery_contact;
};

/// Customers, credentials and live sessions.
///
/// Credential mutations are serialized on an internal mutex so concurrent
/// failed logins cannot skip or overshoot the lock threshold. Sessions are
/// memory-only; a restart requires logging in again.
class Identity {
 public:
  Identity(EventBus& bus, IdentityConfig config);

  Identity(const Identity&) = delete;
  Identity& operator=(const Identity&) = delete;

  LoginResult login(std::string_view username, std::string_view password, Timestamp now);
  /// Read-only probe: never refreshes activity.
  SessionMeta heartbeat(std::string_view token, Timestamp now);
  void acknowledge_continue(std::string_view token, Timestamp now);
  std::string logout(std::string_view token, Timestamp now);
  void change_password(std::string_view token, std::string_view ic_passport_no,
                       std::string_view new_password, Timestamp now);
  Customer update_profile(std::string_view token, const std::map<std::string, std::string>& fields,
                          Timestamp now);
  void cancel_atm(std::string_view token, Timestamp now);

  void admin_reinitialize(std::string_view admin_token, std::string_view username, Timestamp now);
  CustomerId admin_add_customer(std::string_view admin_token, const CustomerDraft& draft,
                                std::string_view username, std::string_view initial_password,
                                Timestamp now);
  void admin_cancel_customer(std::string_view admin_token, CustomerId customer, Timestamp now);

  /// Validates a live session and refreshes its activity; used by every
  /// authenticated request except the heartbeat.
  Session authorize(std::string_view token, Timestamp now);
  /// Validates a live session without touching it.
  Session require(std::string_view token, Timestamp now);
  Session require_admin(std::string_view token, Timestamp now);
  SessionMeta meta(const Session& s, Timestamp now) const;
  /// Drops expired sessions and forgets long-retired tokens.
  std::size_t sweep(Timestamp now);

  /// Builds (without committing) the event that creates a customer.
  CustomerAdded prepare_customer(const CustomerDraft& draft, std::string_view username,
                                 std::string_view password, bool must_change, bool is_admin,
                                 Timestamp now) const;
  /// Creates the administrator credential from configuration if absent.
  void ensure_admin(std::string_view username, std::string_view password, Timestamp now);

  const Customer* find_customer(CustomerId id) const;
  const Credential* find_credential(std::string_view username) const;
  const std::map<CustomerId, Customer>& customers() const { return customers_; }
  const IdentityConfig& config() const { return config_; }
  std::size_t live_sessions() const;

  void apply(const Event& ev);
  void encode_state(Encoder& e) const;
  void decode_state(Decoder& d);

  std::mutex& write_mutex() { return write_mu_; }

 private:
  // Callers hold sessions_mu_.
  Session& live_session(std::string_view token, Timestamp now);
  void retire(const std::string& token, Timestamp now);

  EventBus& bus_;
  IdentityConfig config_;
  std::mutex write_mu_;

  std::map<CustomerId, Customer> customers_;
  std::map<std::string, Credential, std::less<>> credentials_;
  std::uint64_t next_customer_ = 1;

  mutable std::mutex sessions_mu_;
  std::unordered_map<std::string, Session> sessions_;
  std::unordered_map<std::string, Timestamp> retired_;
};

}  // namespace bank
