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

#include "bank/identity.hpp"

#include <algorithm>
#include <cctype>

#include "bank/codec.hpp"
#include "bank/crypto.hpp"

namespace bank {

namespace {

constexpr std::size_t kSaltBytes = 16;
// Retired tokens are remembered this long so reuse reports SESSION_EXPIRED
// rather than UNAUTHENTICATED.
constexpr std::int64_t kRetiredMemoryMs = 24 * 3600 * 1000LL;

bool is_special(char c) { return PasswordPolicy::kSpecialChars.find(c) != std::string_view::npos; }

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string join_rules(const std::vector<PolicyRule>& rules) {
  std::string out = "password policy violated:";
  for (PolicyRule r : rules) {
    out += ' ';
    out += to_string(r);
  }
  return out;
}

bool valid_username(std::string_view u) {
  if (u.empty() || u.size() > 64) return false;
  return std::all_of(u.begin(), u.end(),
                     [](char c) { return is_alnum(c) || c == '_' || c == '.' || c == '-'; });
}

}  // namespace

std::string_view to_string(PolicyRule r) {
  switch (r) {
    case PolicyRule::min_length: return "min_length";
    case PolicyRule::require_special: return "require_special";
    case PolicyRule::allowed_characters: return "allowed_characters";
  }
  return "?";
}

std::vector<PolicyRule> check_password(const PasswordPolicy& policy, std::string_view candidate) {
  std::vector<PolicyRule> failed;
  if (candidate.size() < policy.min_length) failed.push_back(PolicyRule::min_length);
  if (policy.require_special && std::none_of(candidate.begin(), candidate.end(), is_special))
    failed.push_back(PolicyRule::require_special);
  if (!std::all_of(candidate.begin(), candidate.end(),
                   [](char c) { return is_alnum(c) || is_special(c); }))
    failed.push_back(PolicyRule::allowed_characters);
  return failed;
}

Identity::Identity(EventBus& bus, IdentityConfig config) : bus_(bus), config_(std::move(config)) {
  if (config_.policy.max_failed_attempts < 1) fail(ErrorCode::CONFIG_INVALID, "max_failed_attempts");
  if (config_.idle_timeout_s <= 0) fail(ErrorCode::CONFIG_INVALID, "idle_timeout_s");
  if (config_.digest_iterations < 1) fail(ErrorCode::CONFIG_INVALID, "digest_iterations");
  bus_.subscribe([this](const Event& ev) { apply(ev); });
}

// ------------------------------------------------------------- sessions

Session& Identity::live_session(std::string_view token, Timestamp now) {
  auto it = sessions_.find(std::string(token));
  if (it == sessions_.end()) {
    if (retired_.contains(std::string(token))) fail(ErrorCode::SESSION_EXPIRED);
    fail(ErrorCode::UNAUTHENTICATED);
  }
  Session& s = it->second;
  if (now.millis - s.last_activity_at.millis > s.idle_timeout_s * 1000) {
    retire(it->first, now);
    fail(ErrorCode::SESSION_EXPIRED);
  }
  return s;
}

void Identity::retire(const std::string& token, Timestamp now) {
  retired_[token] = now;
  sessions_.erase(token);
}

SessionMeta Identity::meta(const Session& s, Timestamp now) const {
  const std::int64_t remaining_ms = s.idle_timeout_s * 1000 - (now.millis - s.last_activity_at.millis);
  SessionMeta m;
  // round up so "1 ms left" still reads as 1 s
  m.remaining_s = remaining_ms <= 0 ? 0 : (remaining_ms + 999) / 1000;
  m.warn = m.remaining_s > 0 && m.remaining_s <= Session::kWarningWindowS;
  return m;
}

SessionMeta Identity::heartbeat(std::string_view token, Timestamp now) {
  std::lock_guard lock(sessions_mu_);
  return meta(live_session(token, now), now);
}

void Identity::acknowledge_continue(std::string_view token, Timestamp now) {
  std::lock_guard lock(sessions_mu_);
  live_session(token, now).last_activity_at = now;
}

Session Identity::authorize(std::string_view token, Timestamp now) {
  std::lock_guard lock(sessions_mu_);
  Session& s = live_session(token, now);
  s.last_activity_at = now;
  return s;
}

Session Identity::require(std::string_view token, Timestamp now) {
  std::lock_guard lock(sessions_mu_);
  return live_session(token, now);
}

Session Identity::require_admin(std::string_view token, Timestamp now) {
  Session s = require(token, now);
  if (!s.is_admin) fail(ErrorCode::NOT_ADMIN);
  if (s.must_change) fail(ErrorCode::PASSWORD_CHANGE_REQUIRED);
  return s;
}

std::string Identity::logout(std::string_view token, Timestamp now) {
  std::lock_guard lock(sessions_mu_);
  Session& s = live_session(token, now);
  retire(s.token, now);
  return std::string(kLoggedOutMessage);
}

std::size_t Identity::sweep(Timestamp now) {
  std::lock_guard lock(sessions_mu_);
  std::vector<std::string> expired;
  for (const auto& [token, s] : sessions_)
    if (now.millis - s.last_activity_at.millis > s.idle_timeout_s * 1000) expired.push_back(token);
  for (const auto& t : expired) retire(t, now);
  std::erase_if(retired_, [&](const auto& kv) { return now.millis - kv.second.millis > kRetiredMemoryMs; });
  return expired.size();
}

std::size_t Identity::live_sessions() const {
  std::lock_guard lock(sessions_mu_);
  return sessions_.size();
}

// ---------------------------------------------------------------- login

LoginResult Identity::login(std::string_view username, std::string_view password, Timestamp now) {
  std::lock_guard write(write_mu_);
  auto it = credentials_.find(username);
  if (it == credentials_.end())
    fail(ErrorCode::INVALID_CREDENTIALS, std::string(kInvalidLoginMessage));
  const Credential& cred = it->second;
  if (cred.locked) fail(ErrorCode::LOCKED, std::string(kLockedMessage));

  const std::string digest = crypto::derive_password_digest(password, cred.salt, cred.iterations);
  if (!crypto::equal(digest, cred.digest)) {
    const std::uint32_t failed = cred.failed_attempts + 1;
    const bool lock = failed >= config_.policy.max_failed_attempts;
    bus_.commit({CredentialCounterSet{cred.username, failed, lock}});
    fail(ErrorCode::INVALID_CREDENTIALS, std::string(kInvalidLoginMessage));
  }

  const Customer* customer = find_customer(cred.customer);
  if (!customer || customer->status == CustomerStatus::cancelled)
    fail(ErrorCode::CUSTOMER_CANCELLED);

  if (cred.failed_attempts != 0) bus_.commit({CredentialCounterSet{cred.username, 0, false}});

  bool must_change = cred.must_change;
  if (config_.policy.max_age_days) {
    const std::int64_t max_age_ms = std::int64_t{*config_.policy.max_age_days} * kMillisPerDay;
    if (now.millis - cred.password_set_at.millis > max_age_ms) must_change = true;
  }

  Session s;
  s.token = crypto::random_token();
  s.customer = cred.customer;
  s.username = cred.username;
  s.created_at = now;
  s.last_activity_at = now;
  s.idle_timeout_s = config_.idle_timeout_s;
  s.must_change = must_change;
  s.is_admin = cred.is_admin;
  {
    std::lock_guard lock(sessions_mu_);
    sessions_[s.token] = s;
  }
  return {s, std::string(kWelcomeMessage), must_change};
}

// -------------------------------------------------------------- utility

void Identity::change_password(std::string_view token, std::string_view ic_passport_no,
                               std::string_view new_password, Timestamp now) {
  std::lock_guard write(write_mu_);
  const Session s = authorize(token, now);
  const Customer* c = find_customer(s.customer);
  if (!c || !crypto::equal(c->ic_passport_no, ic_passport_no)) fail(ErrorCode::IC_MISMATCH);
  const auto violations = check_password(config_.policy, new_password);
  if (!violations.empty()) fail(ErrorCode::POLICY_VIOLATION, join_rules(violations));

  PasswordChanged ev;
  ev.username = s.username;
  ev.salt = crypto::random_bytes(kSaltBytes);
  ev.iterations = config_.digest_iterations;
  ev.digest = crypto::derive_password_digest(new_password, ev.salt, ev.iterations);
  ev.set_at = now;
  bus_.commit({std::move(ev)});

  std::lock_guard lock(sessions_mu_);
  for (auto& [t, sess] : sessions_)
    if (sess.username == s.username) sess.must_change = false;
}

Customer Identity::update_profile(std::string_view token,
                                  const std::map<std::string, std::string>& fields, Timestamp now) {
  std::lock_guard write(write_mu_);
  const Session s = authorize(token, now);
  if (s.must_change) fail(ErrorCode::PASSWORD_CHANGE_REQUIRED);
  ProfileUpdated ev;
  ev.customer = s.customer;
  for (const auto& [name, value] : fields) {
    if (name == "email") ev.email = value;
    else if (name == "postal_address") ev.postal_address = value;
    else if (name == "phone") ev.phone = value;
    else if (name == "secure_delivery_contact") ev.secure_delivery_contact = value;
    else fail(ErrorCode::INVALID_FIELD, "field not editable: " + name);
  }
  if (!fields.empty()) bus_.commit({std::move(ev)});
  return *find_customer(s.customer);
}

void Identity::cancel_atm(std::string_view token, Timestamp now) {
  std::lock_guard write(write_mu_);
  const Session s = authorize(token, now);
  if (s.must_change) fail(ErrorCode::PASSWORD_CHANGE_REQUIRED);
  const Customer* c = find_customer(s.customer);
  if (!c->atm_enabled) fail(ErrorCode::ALREADY_CANCELLED);
  bus_.commit({AtmCancelled{s.customer}});
}

// ---------------------------------------------------------------- admin

void Identity::admin_reinitialize(std::string_view admin_token, std::string_view username,
                                  Timestamp now) {
  std::lock_guard write(write_mu_);
  require_admin(admin_token, now);
  auto it = credentials_.find(username);
  if (it == credentials_.end()) fail(ErrorCode::UNKNOWN_USER);
  bus_.commit({CredentialCounterSet{it->second.username, 0, false}});
}

CustomerAdded Identity::prepare_customer(const CustomerDraft& draft, std::string_view username,
                                         std::string_view password, bool must_change,
                                         bool is_admin, Timestamp now) const {
  if (!valid_username(username)) fail(ErrorCode::INVALID_FIELD, "username");
  if (draft.ic_passport_no.empty()) fail(ErrorCode::INVALID_FIELD, "ic_passport_no");
  if (draft.full_name.empty()) fail(ErrorCode::INVALID_FIELD, "full_name");
  if (credentials_.contains(username)) fail(ErrorCode::DUPLICATE_USERNAME);
  const auto violations = check_password(config_.policy, password);
  if (!violations.empty()) fail(ErrorCode::POLICY_VIOLATION, join_rules(violations));

  CustomerAdded ev;
  ev.customer.id = CustomerId{next_customer_};
  ev.customer.full_name = draft.full_name;
  ev.customer.ic_passport_no = draft.ic_passport_no;
  ev.customer.email = draft.email;
  ev.customer.postal_address = draft.postal_address;
  ev.customer.phone = draft.phone;
  ev.customer.secure_delivery_contact = draft.secure_delivery_contact;
  ev.customer.atm_enabled = true;
  ev.customer.status = CustomerStatus::active;

  Credential& cred = ev.credential;
  cred.username = std::string(username);
  cred.customer = ev.customer.id;
  cred.salt = crypto::random_bytes(kSaltBytes);
  cred.iterations = config_.digest_iterations;
  cred.digest = crypto::derive_password_digest(password, cred.salt, cred.iterations);
  cred.password_set_at = now;
  cred.must_change = must_change;
  cred.is_admin = is_admin;
  return ev;
}

CustomerId Identity::admin_add_customer(std::string_view admin_token, const CustomerDraft& draft,
                                        std::string_view username,
                                        std::string_view initial_password, Timestamp now) {
  std::lock_guard write(write_mu_);
  require_admin(admin_token, now);
  auto ev = prepare_customer(draft, username, initial_password, true, false, now);
  const CustomerId id = ev.customer.id;
  bus_.commit({std::move(ev)});
  return id;
}

void Identity::admin_cancel_customer(std::string_view admin_token, CustomerId customer,
                                     Timestamp now) {
  std::lock_guard write(write_mu_);
  require_admin(admin_token, now);
  const Customer* c = find_customer(customer);
  if (!c) fail(ErrorCode::UNKNOWN_CUSTOMER);
  if (c->status == CustomerStatus::cancelled) fail(ErrorCode::ALREADY_CANCELLED);
  for (const auto& [name, cred] : credentials_)
    if (cred.customer == customer && cred.is_admin)
      fail(ErrorCode::INVALID_FIELD, "administrators cannot be cancelled");
  bus_.commit({CustomerCancelled{customer}});
}

void Identity::ensure_admin(std::string_view username, std::string_view password, Timestamp now) {
  std::lock_guard write(write_mu_);
  if (auto it = credentials_.find(username); it != credentials_.end()) {
    if (!it->second.is_admin) fail(ErrorCode::CONFIG_INVALID, "admin username belongs to a customer");
    return;
  }
  CustomerDraft draft;
  draft.full_name = "Bank Administrator";
  draft.ic_passport_no = "ADMIN";
  bus_.commit({prepare_customer(draft, username, password, false, true, now)});
}

const Customer* Identity::find_customer(CustomerId id) const {
  auto it = customers_.find(id);
  return it == customers_.end() ? nullptr : &it->second;
}

const Credential* Identity::find_credential(std::string_view username) const {
  auto it = credentials_.find(username);
  return it == credentials_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------- state

void Identity::apply(const Event& ev) {
  if (auto* a = std::get_if<CustomerAdded>(&ev)) {
    customers_[a->customer.id] = a->customer;
    credentials_[a->credential.username] = a->credential;
    next_customer_ = std::max(next_customer_, a->customer.id.value + 1);
  } else if (auto* c = std::get_if<CustomerCancelled>(&ev)) {
    if (auto it = customers_.find(c->customer); it != customers_.end())
      it->second.status = CustomerStatus::cancelled;
    std::lock_guard lock(sessions_mu_);
    std::vector<std::pair<std::string, Timestamp>> doomed;
    for (const auto& [t, s] : sessions_)
      if (s.customer == c->customer) doomed.emplace_back(t, s.last_activity_at);
    for (const auto& [t, at] : doomed) retire(t, at);
  } else if (auto* k = std::get_if<CredentialCounterSet>(&ev)) {
    if (auto it = credentials_.find(k->username); it != credentials_.end()) {
      it->second.failed_attempts = k->failed_attempts;
      it->second.locked = k->locked;
    }
  } else if (auto* p = std::get_if<PasswordChanged>(&ev)) {
    if (auto it = credentials_.find(p->username); it != credentials_.end()) {
      it->second.salt = p->salt;
      it->second.digest = p->digest;
      it->second.iterations = p->iterations;
      it->second.password_set_at = p->set_at;
      it->second.must_change = false;
    }
  } else if (auto* u = std::get_if<ProfileUpdated>(&ev)) {
    if (auto it = customers_.find(u->customer); it != customers_.end()) {
      Customer& cu = it->second;
      if (u->email) cu.email = *u->email;
      if (u->postal_address) cu.postal_address = *u->postal_address;
      if (u->phone) cu.phone = *u->phone;
      if (u->secure_delivery_contact) cu.secure_delivery_contact = *u->secure_delivery_contact;
    }
  } else if (auto* atm = std::get_if<AtmCancelled>(&ev)) {
    if (auto it = customers_.find(atm->customer); it != customers_.end())
      it->second.atm_enabled = false;
  }
}

void Identity::encode_state(Encoder& e) const {
  e.u64(next_customer_);
  e.u32(static_cast<std::uint32_t>(customers_.size()));
  for (const auto& [id, c] : customers_) put(e, c);
  e.u32(static_cast<std::uint32_t>(credentials_.size()));
  for (const auto& [name, c] : credentials_) put(e, c);
}

void Identity::decode_state(Decoder& d) {
  customers_.clear();
  credentials_.clear();
  next_customer_ = d.u64();
  for (std::uint32_t i = 0, n = d.u32(); i < n; ++i) {
    Customer c;
    get(d, c);
    customers_[c.id] = c;
  }
  for (std::uint32_t i = 0, n = d.u32(); i < n; ++i) {
    Credential c;
    get(d, c);
    credentials_[c.username] = c;
  }
}

}  // namespace bank
