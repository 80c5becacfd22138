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

#include <cstdlib>
#include <fstream>

#include "bank/api.hpp"
#include "bank/error.hpp"

namespace bank::api {

namespace {

[[noreturn]] void invalid(const std::string& msg) { fail(ErrorCode::CONFIG_INVALID, msg); }

const Json* field(const Json& obj, const char* name) {
  auto it = obj.find(name);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

template <class T>
void read_positive(const Json& obj, const char* name, T& out, const std::string& prefix = "") {
  const Json* v = field(obj, name);
  if (!v) return;
  if (!v->is_number_integer() || v->get<std::int64_t>() <= 0)
    invalid(prefix + name + " must be a positive integer");
  out = static_cast<T>(v->get<std::int64_t>());
}

std::string read_string(const Json& obj, const char* name, const std::string& prefix = "") {
  const Json* v = field(obj, name);
  if (!v || !v->is_string() || v->get<std::string>().empty())
    invalid(prefix + name + " must be a non-empty string");
  return v->get<std::string>();
}

}  // namespace

ServerConfig parse_config(const Json& doc) {
  if (!doc.is_object()) invalid("config must be a JSON object");
  ServerConfig c;
  if (field(doc, "listen_host")) c.listen_host = read_string(doc, "listen_host");
  if (const Json* p = field(doc, "listen_port")) {
    if (!p->is_number_integer() || p->get<int>() < 0 || p->get<int>() > 65535)
      invalid("listen_port must be 0..65535");
    c.listen_port = p->get<int>();
  }
  if (field(doc, "data_dir")) c.data_dir = read_string(doc, "data_dir");
  read_positive(doc, "idle_timeout_s", c.identity.idle_timeout_s);
  read_positive(doc, "max_failed_attempts", c.identity.policy.max_failed_attempts);
  read_positive(doc, "digest_iterations", c.identity.digest_iterations);
  read_positive(doc, "tac_ttl_s", c.payments.tac_ttl_s);

  if (const Json* p = field(doc, "password_policy")) {
    if (!p->is_object()) invalid("password_policy must be an object");
    read_positive(*p, "min_length", c.identity.policy.min_length, "password_policy.");
    if (const Json* r = field(*p, "require_special")) {
      if (!r->is_boolean()) invalid("password_policy.require_special must be a boolean");
      c.identity.policy.require_special = r->get<bool>();
    }
    // null or absent keeps the default; false disables periodic change
    if (const Json* a = field(*p, "max_age_days")) {
      if (a->is_boolean() && !a->get<bool>()) {
        c.identity.policy.max_age_days.reset();
      } else {
        std::int64_t days = 0;
        read_positive(*p, "max_age_days", days, "password_policy.");
        c.identity.policy.max_age_days = static_cast<std::int32_t>(days);
      }
    }
  }

  if (const Json* b = field(doc, "backup")) {
    if (!b->is_object()) invalid("backup must be an object");
    c.backup_enabled = true;
    if (const Json* e = field(*b, "enabled")) {
      if (!e->is_boolean()) invalid("backup.enabled must be a boolean");
      c.backup_enabled = e->get<bool>();
    }
    read_positive(*b, "interval_s", c.backup.interval_s, "backup.");
    read_positive(*b, "complete_every", c.backup.complete_every, "backup.");
    if (field(*b, "offsite_target")) c.backup.offsite_target = read_string(*b, "offsite_target", "backup.");
    if (c.backup_enabled && !c.data_dir) invalid("backup requires data_dir");
  }

  if (const Json* a = field(doc, "admin")) {
    if (!a->is_object()) invalid("admin must be an object");
    c.admin = AdminBootstrap{read_string(*a, "username", "admin."), read_string(*a, "password", "admin.")};
  }
  return c;
}

ServerConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) invalid("cannot read config " + file.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    invalid(file.string() + ": " + e.what());
  }
  return parse_config(doc);
}

std::filesystem::path config_path(const std::optional<std::filesystem::path>& fallback) {
  if (const char* env = std::getenv("BANK_CONFIG"); env && *env) return env;
  if (!fallback) invalid("no config file given and BANK_CONFIG is unset");
  return *fallback;
}

BankOptions ServerConfig::bank_options(std::shared_ptr<Clock> clock) const {
  BankOptions o;
  o.identity = identity;
  o.payments = payments;
  o.data_dir = data_dir;
  o.admin = admin;
  o.clock = std::move(clock);
  return o;
}

SeedReport seed_fixture(Bank& bank, const Json& fixture) {
  auto bad = [](const std::string& msg) -> void { fail(ErrorCode::SCHEMA_VIOLATION, "fixture: " + msg); };
  if (!fixture.is_object() || !fixture.contains("customers") || !fixture["customers"].is_array())
    bad("expected {\"customers\": [...]}");
  auto text = [&](const Json& o, const char* name, bool required) {
    if (!o.contains(name) || o[name].is_null()) {
      if (required) bad(std::string("missing ") + name);
      return std::string();
    }
    if (!o[name].is_string()) bad(std::string(name) + " must be a string");
    return o[name].get<std::string>();
  };
  auto minor = [&](const Json& o, const char* name) {
    if (!o.contains(name)) return std::int64_t{0};
    if (!o[name].is_number_integer()) bad(std::string(name) + " must be an integer (minor units)");
    return o[name].get<std::int64_t>();
  };

  SeedReport report;
  for (const auto& c : fixture["customers"]) {
    if (!c.is_object()) bad("customer must be an object");
    CustomerDraft d;
    d.full_name = text(c, "full_name", true);
    d.ic_passport_no = text(c, "ic_passport_no", true);
    d.email = text(c, "email", false);
    d.postal_address = text(c, "postal_address", false);
    d.phone = text(c, "phone", false);
    d.secure_delivery_contact = text(c, "secure_delivery_contact", false);
    std::vector<AccountSpec> specs;
    if (c.contains("accounts")) {
      if (!c["accounts"].is_array()) bad("accounts must be an array");
      for (const auto& a : c["accounts"]) {
        auto kind = parse_account_kind(text(a, "kind", true));
        if (!kind || *kind == AccountKind::clearing) bad("unknown account kind");
        specs.push_back({*kind, Money{minor(a, "opening_balance"), kDefaultCurrency},
                         Money{minor(a, "credit_limit"), kDefaultCurrency}});
      }
    }
    const bool must_change = c.value("must_change", false);
    report.customers.push_back(bank.seed_customer(d, text(c, "username", true),
                                                  text(c, "password", true), must_change, specs));
  }
  return report;
}

}  // namespace bank::api
