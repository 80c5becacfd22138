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

#include <charconv>

#include "bank/api.hpp"
#include "bank/error.hpp"
#include "views.hpp"

namespace bank::api {

namespace {

constexpr std::size_t kDefaultPageSize = 50;
constexpr std::size_t kMaxPageSize = 500;

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const std::size_t j = std::min(path.find('/', i), path.size());
    out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::SCHEMA_VIOLATION, msg); }

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

Json error_body(ErrorCode code, const std::string& message) {
  return {{"ok", false},
          {"error", {{"code", std::string(to_string(code))},
                     {"message", message},
                     {"http_status", http_status(code)}}}};
}

}  // namespace

struct Router::Route {
  std::string method;
  std::string pattern;
  std::vector<std::string> segments;
  bool authenticated;
  std::function<Json(Context&)> fn;
};

struct Router::Context {
  Bank& bank;
  const Request& req;
  std::map<std::string, std::string> params;
  std::string token;
  std::optional<Json> parsed;

  const Json& body() {
    if (!parsed) {
      if (req.body.empty()) {
        parsed = Json::object();
      } else {
        try {
          parsed = Json::parse(req.body);
        } catch (const Json::exception&) {
          schema("body is not valid JSON");
        }
      }
      if (!parsed->is_object()) schema("body must be a JSON object");
    }
    return *parsed;
  }

  bool has(const char* name) { return body().contains(name) && !body()[name].is_null(); }

  std::string str(const char* name) {
    if (!has(name)) schema(std::string("missing field: ") + name);
    const Json& v = body()[name];
    if (!v.is_string()) schema(std::string(name) + " must be a string");
    return v.get<std::string>();
  }

  std::optional<std::string> opt_str(const char* name) {
    if (!has(name)) return std::nullopt;
    return str(name);
  }

  std::int64_t integer(const Json& v, const std::string& name) {
    if (!v.is_number_integer()) schema(name + " must be an integer");
    return v.get<std::int64_t>();
  }

  Money money(const char* name) {
    if (!has(name)) schema(std::string("missing field: ") + name);
    const Json& v = body()[name];
    if (v.is_number_integer()) return Money{v.get<std::int64_t>(), kDefaultCurrency};
    if (!v.is_object() || !v.contains("amount_minor"))
      schema(std::string(name) + " must be {amount_minor, currency}");
    Money m{integer(v["amount_minor"], std::string(name) + ".amount_minor"), kDefaultCurrency};
    if (v.contains("currency")) {
      const Json& c = v["currency"];
      std::optional<Currency> cur;
      if (c.is_string()) cur = Currency::parse(c.get<std::string>());
      if (!cur) schema(std::string(name) + ".currency must be a 3-letter code");
      m.currency = *cur;
    }
    return m;
  }

  Date date_value(const std::string& text, const std::string& name) {
    auto d = Date::parse(text);
    if (!d) schema(name + " must be YYYY-MM-DD");
    return *d;
  }

  /// Absent means today.
  Date date(const char* name) {
    if (!has(name)) return Date::of(bank.now());
    return date_value(str(name), name);
  }

  template <class IdT>
  IdT id_value(const Json& v, const std::string& name) {
    std::optional<std::uint64_t> n;
    if (v.is_string()) n = parse_u64(v.get<std::string>());
    else if (v.is_number_unsigned()) n = v.get<std::uint64_t>();
    if (!n) schema(name + " must be an id");
    return IdT{*n};
  }

  template <class IdT>
  IdT id(const char* name) {
    if (!has(name)) schema(std::string("missing field: ") + name);
    return id_value<IdT>(body()[name], name);
  }

  template <class IdT>
  IdT param(const std::string& name) {
    auto n = parse_u64(params.at(name));
    if (!n) schema(name + " must be an id");
    return IdT{*n};
  }

  std::optional<std::string> query(const std::string& name) const {
    auto it = req.query.find(name);
    if (it == req.query.end()) return std::nullopt;
    return it->second;
  }

  template <class IdT>
  IdT query_id(const std::string& name) {
    auto v = query(name);
    if (!v) schema("missing query parameter: " + name);
    auto n = parse_u64(*v);
    if (!n) schema(name + " must be an id");
    return IdT{*n};
  }

  /// ?from=&to= defaulting to the 90-day customer window ending today.
  std::pair<Date, Date> window() {
    const Date today = Date::of(bank.now());
    auto f = query("from"), t = query("to");
    const Date to = t ? date_value(*t, "to") : today;
    const Date from = f ? date_value(*f, "from") : today - static_cast<std::int32_t>(kHistoryRetentionDays);
    return {from, to};
  }

  std::size_t page_param(const std::string& name, std::size_t fallback) {
    auto v = query(name);
    if (!v) return fallback;
    auto n = parse_u64(*v);
    if (!n) schema(name + " must be a non-negative integer");
    return static_cast<std::size_t>(*n);
  }

  BillRequest bill_request() {
    BillRequest r;
    r.payer = id<AccountId>("payer_account_id");
    r.amount = money("amount");
    r.bill_ref = opt_str("bill_ref");
    r.effective_date = date("effective_date");
    return r;
  }
};

Router::~Router() = default;

void Router::add(std::string method, std::string pattern, bool authenticated,
                 std::function<Json(Context&)> fn) {
  auto segments = split_path(pattern);
  routes_.push_back({std::move(method), std::move(pattern), std::move(segments), authenticated,
                     std::move(fn)});
}

std::vector<std::string> Router::routes() const {
  std::vector<std::string> out;
  for (const auto& r : routes_) out.push_back(r.method + " " + r.pattern);
  return out;
}

Router::Router(Bank& bank) : bank_(bank) {
  const Json ok = Json::object();

  // ------------------------------------------------------------ public
  add("POST", "/login", false, [](Context& c) {
    const LoginResult r = c.bank.login(c.str("username"), c.str("password"));
    c.token = r.session.token;
    return Json{{"token", r.session.token},
                {"message", r.message},
                {"must_change", r.must_change},
                {"customer_id", id_str(r.session.customer)},
                {"is_admin", r.session.is_admin}};
  });
  add("GET", "/health", false, [](Context& c) {
    const Health h = c.bank.health();
    if (!h.ok) fail(ErrorCode::STORAGE_FAILURE, "journal is not writable");
    return Json{{"status", "ok"}, {"uptime_s", h.uptime_s}, {"journal_seq", h.journal_seq}};
  });
  add("GET", "/payees/top-ten", false,
      [](Context& c) { return Json{{"payees", c.bank.top_ten_payees()}}; });

  // ------------------------------------------------------------ session
  add("POST", "/logout", true, [](Context& c) {
    std::string msg = c.bank.logout(c.token);
    return Json{{"message", msg}};
  });
  add("GET", "/session/heartbeat", true,
      [](Context& c) { return to_json(c.bank.heartbeat(c.token)); });
  add("POST", "/session/continue", true,
      [](Context& c) { return to_json(c.bank.acknowledge_continue(c.token)); });
  add("POST", "/password", true, [ok](Context& c) {
    c.bank.change_password(c.token, c.str("ic_passport_no"), c.str("new_password"));
    return ok;
  });
  add("GET", "/profile", true, [](Context& c) { return to_json(c.bank.profile(c.token)); });
  add("PUT", "/profile", true, [](Context& c) {
    std::map<std::string, std::string> fields;
    for (const auto& [k, v] : c.body().items()) {
      if (!v.is_string()) schema(k + " must be a string");
      fields[k] = v.get<std::string>();
    }
    return to_json(c.bank.update_profile(c.token, fields));
  });
  add("DELETE", "/atm", true, [ok](Context& c) {
    c.bank.cancel_atm(c.token);
    return ok;
  });

  // ------------------------------------------------------------ accounts
  add("GET", "/accounts", true, [](Context& c) { return to_json(c.bank.accounts(c.token)); });
  add("GET", "/accounts/{id}/history", true, [](Context& c) {
    auto [from, to] = c.window();
    return to_json(c.bank.history(c.token, c.param<AccountId>("id"), from, to));
  });
  add("POST", "/statements", true, [](Context& c) {
    auto channel = parse_statement_channel(c.str("channel"));
    if (!channel) fail(ErrorCode::INVALID_CHANNEL);
    return to_json(c.bank.request_statement(c.token, c.id<AccountId>("account_id"), *channel));
  });

  // ------------------------------------------------------------ transfers
  add("POST", "/tac", true, [](Context& c) {
    return Json{{"tac", c.bank.issue_tac(c.token)}, {"ttl_s", c.bank.options().payments.tac_ttl_s}};
  });
  add("GET", "/beneficiaries", true,
      [](Context& c) { return to_json(c.bank.list_beneficiaries(c.token)); });
  add("POST", "/beneficiaries", true, [](Context& c) {
    return to_json(c.bank.save_beneficiary(c.token, c.str("account_no"), c.str("nickname")));
  });
  add("PUT", "/beneficiaries/{id}", true, [](Context& c) {
    return to_json(c.bank.update_beneficiary(c.token, c.param<BeneficiaryId>("id"),
                                             c.opt_str("account_no"), c.opt_str("nickname")));
  });
  add("DELETE", "/beneficiaries/{id}", true, [ok](Context& c) {
    c.bank.delete_beneficiary(c.token, c.param<BeneficiaryId>("id"));
    return ok;
  });
  add("POST", "/transfers", true, [](Context& c) {
    TransferRequest r;
    r.source = c.id<AccountId>("source_account_id");
    if (!c.has("target") || !c.body()["target"].is_object()) schema("target must be an object");
    const Json& t = c.body()["target"];
    const std::string kind = t.value("kind", "");
    if (kind == "own_account") {
      r.target.kind = TransferTarget::Kind::own_account;
      if (!t.contains("account_id")) schema("missing field: target.account_id");
      r.target.account = c.id_value<AccountId>(t["account_id"], "target.account_id");
    } else if (kind == "beneficiary") {
      r.target.kind = TransferTarget::Kind::beneficiary;
      if (!t.contains("beneficiary_id")) schema("missing field: target.beneficiary_id");
      r.target.beneficiary = c.id_value<BeneficiaryId>(t["beneficiary_id"], "target.beneficiary_id");
    } else {
      schema("target.kind must be own_account or beneficiary");
    }
    r.amount = c.money("amount");
    r.effective_date = c.date("effective_date");
    r.tac = c.str("tac");
    r.notify_email = c.opt_str("notify_email");
    return to_json(c.bank.create_transfer(c.token, std::move(r)));
  });
  add("GET", "/transfers/pending", true,
      [](Context& c) { return to_json(c.bank.pending_transfers(c.token)); });
  add("GET", "/transfers/history", true, [](Context& c) {
    auto [from, to] = c.window();
    return to_json(c.bank.transfer_history(c.token, from, to));
  });
  add("POST", "/transfers/{id}/cancel", true, [ok](Context& c) {
    c.bank.cancel_pending_transfer(c.token, c.param<InstructionId>("id"));
    return ok;
  });

  // ------------------------------------------------------------ bills
  add("GET", "/billers", true, [](Context& c) { return to_json(c.bank.registrations(c.token)); });
  add("POST", "/billers", true, [](Context& c) {
    return to_json(c.bank.register_biller(c.token, c.str("corporation"), c.str("bill_account_no"),
                                          c.str("holder_name")));
  });
  add("POST", "/billers/deregister", true, [ok](Context& c) {
    if (!c.has("registration_ids") || !c.body()["registration_ids"].is_array())
      schema("registration_ids must be an array");
    std::vector<RegistrationId> ids;
    for (const auto& v : c.body()["registration_ids"])
      ids.push_back(c.id_value<RegistrationId>(v, "registration_ids[]"));
    c.bank.deregister_billers(c.token, ids);
    return ok;
  });
  add("POST", "/payments/registered", true, [](Context& c) {
    const auto reg = c.id<RegistrationId>("registration_id");
    return Json{{"message", "Confirm"},
                {"payment", to_json(c.bank.pay_registered(c.token, reg, c.bill_request()))}};
  });
  add("POST", "/payments/open", true, [](Context& c) {
    const std::string corp = c.str("corporation");
    const std::string acct = c.str("bill_account_no");
    const std::string holder = c.str("holder_name");
    return Json{{"message", "Confirm"},
                {"payment", to_json(c.bank.open_payment(c.token, corp, acct, holder, c.bill_request()))}};
  });
  add("GET", "/payments/pending", true,
      [](Context& c) { return to_json(c.bank.enquire_future_payments(c.token)); });
  add("GET", "/payments/history", true, [](Context& c) {
    auto [from, to] = c.window();
    return to_json(c.bank.bill_payment_history(c.token, from, to));
  });
  add("POST", "/payments/{id}/cancel", true, [ok](Context& c) {
    c.bank.cancel_future_payment(c.token, c.param<InstructionId>("id"));
    return ok;
  });

  // ------------------------------------------------------------ cheques
  add("GET", "/cheques/{no}", true, [](Context& c) {
    return to_json(c.bank.cheque_status(c.token, c.query_id<AccountId>("account_id"), c.params.at("no")));
  });
  add("POST", "/cheques/{no}/stop", true, [](Context& c) {
    return to_json(c.bank.stop_cheque(c.token, c.id<AccountId>("account_id"), c.params.at("no")));
  });
  add("POST", "/cheque-books", true, [](Context& c) {
    if (!c.has("leaves")) schema("missing field: leaves");
    const std::int64_t leaves = c.integer(c.body()["leaves"], "leaves");
    if (leaves < 0 || leaves > 1000) fail(ErrorCode::INVALID_LEAVES);
    return to_json(c.bank.request_cheque_book(c.token, c.id<AccountId>("account_id"),
                                              static_cast<std::uint32_t>(leaves)));
  });

  // ------------------------------------------------------------ administrator
  add("POST", "/admin/customers", true, [](Context& c) {
    CustomerDraft d;
    d.full_name = c.str("full_name");
    d.ic_passport_no = c.str("ic_passport_no");
    d.email = c.opt_str("email").value_or("");
    d.postal_address = c.opt_str("postal_address").value_or("");
    d.phone = c.opt_str("phone").value_or("");
    d.secure_delivery_contact = c.opt_str("secure_delivery_contact").value_or("");
    std::vector<AccountSpec> specs;
    if (c.has("accounts")) {
      const Json& arr = c.body()["accounts"];
      if (!arr.is_array()) schema("accounts must be an array");
      for (const auto& a : arr) {
        if (!a.is_object() || !a.contains("kind") || !a["kind"].is_string())
          schema("accounts[].kind is required");
        auto kind = parse_account_kind(a["kind"].get<std::string>());
        if (!kind || *kind == AccountKind::clearing) schema("accounts[].kind is invalid");
        AccountSpec s;
        s.kind = *kind;
        if (a.contains("opening_balance"))
          s.opening_balance = {c.integer(a["opening_balance"], "accounts[].opening_balance"),
                               kDefaultCurrency};
        if (a.contains("credit_limit"))
          s.credit_limit = {c.integer(a["credit_limit"], "accounts[].credit_limit"), kDefaultCurrency};
        specs.push_back(s);
      }
    }
    const NewCustomer n = c.bank.admin_add_customer(c.token, d, c.str("username"),
                                                    c.str("initial_password"), specs);
    Json accounts = Json::array();
    for (auto id : n.accounts) accounts.push_back(id_str(id));
    return Json{{"customer_id", id_str(n.customer)}, {"account_ids", accounts}};
  });
  add("POST", "/admin/customers/{id}/cancel", true, [ok](Context& c) {
    c.bank.admin_cancel_customer(c.token, c.param<CustomerId>("id"));
    return ok;
  });
  add("POST", "/admin/credentials/{username}/reinitialize", true, [ok](Context& c) {
    c.bank.admin_reinitialize(c.token, c.params.at("username"));
    return ok;
  });
  add("POST", "/admin/cheques/present", true, [](Context& c) {
    return to_json(c.bank.admin_present_cheque(c.token, c.id<AccountId>("account_id"),
                                               c.str("cheque_no"), c.money("amount")));
  });
  add("POST", "/admin/cheque-books/{id}/dispatch", true, [](Context& c) {
    return to_json(c.bank.admin_dispatch_cheque_book(c.token, c.param<RequestId>("id")));
  });
  add("POST", "/admin/run-value-date", true, [](Context& c) {
    return to_json(c.bank.admin_run_value_date(c.token, c.date("business_date")));
  });
  add("GET", "/admin/transactions", true, [](Context& c) {
    const std::size_t offset = c.page_param("offset", 0);
    const std::size_t limit = std::min(c.page_param("limit", kDefaultPageSize), kMaxPageSize);
    const EntryPage page = c.bank.admin_transactions(c.token, offset, limit);
    return Json{{"total", page.total},
                {"offset", offset},
                {"limit", limit},
                {"items", to_json(page.items)}};
  });
}

Response Router::handle(const Request& req) {
  Response res;
  const auto segments = split_path(req.path);
  const Route* route = nullptr;
  std::map<std::string, std::string> params;
  for (const auto& r : routes_) {
    if (r.method != req.method || r.segments.size() != segments.size()) continue;
    params.clear();
    bool match = true;
    for (std::size_t i = 0; i < segments.size() && match; ++i) {
      const std::string& s = r.segments[i];
      if (s.size() > 2 && s.front() == '{' && s.back() == '}')
        params[s.substr(1, s.size() - 2)] = segments[i];
      else
        match = s == segments[i];
    }
    if (match) {
      route = &r;
      break;
    }
  }
  if (!route) {
    res.status = 404;
    res.body = error_body(ErrorCode::UNKNOWN_ROUTE, "no route for " + req.method + " " + req.path);
    return res;
  }

  Context ctx{bank_, req, std::move(params), {}, std::nullopt};
  try {
    if (route->authenticated) {
      constexpr std::string_view kBearer = "Bearer ";
      if (req.authorization.rfind(kBearer, 0) != 0 || req.authorization.size() == kBearer.size())
        fail(ErrorCode::UNAUTHENTICATED, "missing bearer token");
      ctx.token = req.authorization.substr(kBearer.size());
    }
    Json data = route->fn(ctx);
    res.body = {{"ok", true}, {"data", std::move(data)}};
  } catch (const Error& e) {
    res.status = http_status(e.code());
    res.body = error_body(e.code(), e.what());
  } catch (const Json::exception& e) {
    res.status = 422;
    res.body = error_body(ErrorCode::SCHEMA_VIOLATION, e.what());
  } catch (const std::exception& e) {
    res.status = 500;
    res.body = error_body(ErrorCode::INTERNAL, e.what());
  }

  if (!ctx.token.empty()) {
    if (auto meta = bank_.session_meta(ctx.token)) {
      res.headers["X-Session-Remaining"] = std::to_string(meta->remaining_s);
      res.headers["X-Session-Warn"] = meta->warn ? "true" : "false";
      res.body["session"] = to_json(*meta);
    }
  }
  return res;
}

}  // namespace bank::api
