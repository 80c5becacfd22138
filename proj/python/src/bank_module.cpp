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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bank/api.hpp"
#include "bank/bank.hpp"

namespace py = pybind11;

namespace {

using namespace bank;

AccountKind kind_of(const std::string& s) {
  if (s == "current") return AccountKind::current;
  if (s == "saving") return AccountKind::saving;
  if (s == "credit_card") return AccountKind::credit_card;
  throw py::value_error("unknown account kind: " + s);
}

Date date_of(const std::string& s) {
  auto d = Date::parse(s);
  if (!d) throw py::value_error("expected YYYY-MM-DD, got " + s);
  return *d;
}

std::vector<std::uint64_t> ids(const std::vector<InstructionId>& v) {
  std::vector<std::uint64_t> out;
  for (auto id : v) out.push_back(id.value);
  return out;
}

/// A bank on its own virtual clock, plus the JSON router in front of it.
class PyBank {
 public:
  PyBank(std::optional<std::string> data_dir, std::optional<std::int64_t> start_ms,
         std::int64_t idle_timeout_s, std::uint32_t max_failed_attempts,
         std::uint32_t digest_iterations, std::optional<std::string> admin_username,
         std::optional<std::string> admin_password, bool read_only) {
    clock_ = std::make_shared<ManualClock>(start_ms ? Timestamp{*start_ms} : SystemClock().now());
    BankOptions o;
    o.clock = clock_;
    o.identity.idle_timeout_s = idle_timeout_s;
    o.identity.policy.max_failed_attempts = max_failed_attempts;
    o.identity.digest_iterations = digest_iterations;
    if (data_dir) o.data_dir = *data_dir;
    o.read_only = read_only;
    if (admin_username && admin_password) o.admin = AdminBootstrap{*admin_username, *admin_password};
    bank_ = std::make_unique<Bank>(std::move(o));
    router_ = std::make_unique<api::Router>(*bank_);
  }

  std::int64_t now_ms() const { return clock_->now().millis; }
  std::string today() const { return Date::of(clock_->now()).to_string(); }
  void advance(std::int64_t seconds) { clock_->advance_seconds(seconds); }

  py::dict login(const std::string& user, const std::string& password) {
    const LoginResult r = bank_->login(user, password);
    py::dict d;
    d["token"] = r.session.token;
    d["message"] = r.message;
    d["must_change"] = r.must_change;
    return d;
  }

  std::tuple<std::int64_t, bool> heartbeat(const std::string& token) {
    const SessionMeta m = bank_->heartbeat(token);
    return {m.remaining_s, m.warn};
  }

  std::tuple<std::int64_t, bool> continue_session(const std::string& token) {
    const SessionMeta m = bank_->acknowledge_continue(token);
    return {m.remaining_s, m.warn};
  }

  std::tuple<std::uint64_t, std::vector<std::uint64_t>> seed_customer(
      const std::string& username, const std::string& password, const std::string& full_name,
      const std::string& ic_passport_no,
      const std::vector<std::tuple<std::string, std::int64_t>>& accounts, bool must_change) {
    CustomerDraft d;
    d.full_name = full_name;
    d.ic_passport_no = ic_passport_no;
    std::vector<AccountSpec> specs;
    for (const auto& [kind, opening] : accounts)
      specs.push_back({kind_of(kind), Money{opening, kDefaultCurrency}, Money{0, kDefaultCurrency}});
    const NewCustomer n = bank_->seed_customer(d, username, password, must_change, specs);
    std::vector<std::uint64_t> out;
    for (AccountId a : n.accounts) out.push_back(a.value);
    return {n.customer.value, out};
  }

  std::int64_t balance(std::uint64_t account) const {
    return bank_->ledger().balance(AccountId{account}).amount_minor;
  }

  py::dict transfer(const std::string& token, std::uint64_t source, std::uint64_t target,
                    std::int64_t amount, std::optional<std::string> effective_date) {
    TransferRequest r;
    r.source = AccountId{source};
    r.target.kind = TransferTarget::Kind::own_account;
    r.target.account = AccountId{target};
    r.amount = Money{amount, kDefaultCurrency};
    r.effective_date = effective_date ? date_of(*effective_date) : Date::of(clock_->now());
    r.tac = bank_->issue_tac(token);
    const TransferInstruction t = bank_->create_transfer(token, r);
    py::dict d;
    d["id"] = t.id.value;
    d["status"] = t.status == InstructionStatus::pending    ? "pending"
                  : t.status == InstructionStatus::executed ? "executed"
                  : t.status == InstructionStatus::failed   ? "failed"
                                                            : "cancelled";
    return d;
  }

  py::dict run_value_date(const std::string& date) {
    const ExecutionReport r = bank_->run_value_date(date_of(date));
    py::dict d;
    d["already_processed"] = r.already_processed;
    d["executed"] = ids(r.executed);
    d["failed"] = ids(r.failed);
    return d;
  }

  std::uint64_t snapshot(const std::string& mode) {
    if (mode != "complete" && mode != "incremental")
      throw py::value_error("mode must be complete or incremental");
    return bank_->snapshot(mode == "complete" ? persist::SnapshotMode::complete
                                              : persist::SnapshotMode::incremental)
        .id;
  }

  py::bytes state_bytes() const { return py::bytes(bank_->state_bytes()); }

  std::tuple<int, std::string, std::map<std::string, std::string>> request(
      const std::string& method, const std::string& path, const std::string& token,
      const std::string& body, const std::map<std::string, std::string>& query) {
    api::Request r;
    r.method = method;
    r.path = path;
    r.query = query;
    if (!token.empty()) r.authorization = "Bearer " + token;
    r.body = body;
    api::Response res;
    {
      py::gil_scoped_release release;
      res = router_->handle(r);
    }
    return {res.status, res.body.dump(), res.headers};
  }

  Bank& bank() { return *bank_; }

 private:
  std::shared_ptr<ManualClock> clock_;
  std::unique_ptr<Bank> bank_;
  std::unique_ptr<api::Router> router_;
};

}  // namespace

PYBIND11_MODULE(_bank, m) {
  m.doc() = "Internet banking core";

  // Leaked on purpose: it must outlive the interpreter's own teardown.
  static auto* bank_error = new py::exception<Error>(m, "BankError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::reinterpret_borrow<py::object>(bank_error->ptr());
      py::object inst = type(std::string(to_string(e.code())), e.what());
      PyErr_SetObject(bank_error->ptr(), inst.ptr());
    }
  });

  py::class_<PyBank>(m, "Bank")
      .def(py::init<std::optional<std::string>, std::optional<std::int64_t>, std::int64_t, std::uint32_t,
                    std::uint32_t, std::optional<std::string>, std::optional<std::string>, bool>(),
           py::arg("data_dir") = py::none(), py::kw_only(), py::arg("start_ms") = py::none(),
           py::arg("idle_timeout_s") = 300, py::arg("max_failed_attempts") = 3,
           py::arg("digest_iterations") = 100'000, py::arg("admin_username") = py::none(),
           py::arg("admin_password") = py::none(), py::arg("read_only") = false)
      .def_property_readonly("now_ms", &PyBank::now_ms)
      .def("today", &PyBank::today)
      .def("advance", &PyBank::advance, py::arg("seconds"))
      .def("login", &PyBank::login, py::arg("username"), py::arg("password"))
      .def("logout", [](PyBank& b, const std::string& t) { return b.bank().logout(t); }, py::arg("token"))
      .def("heartbeat", &PyBank::heartbeat, py::arg("token"))
      .def("continue_session", &PyBank::continue_session, py::arg("token"))
      .def("seed_customer", &PyBank::seed_customer, py::arg("username"), py::arg("password"),
           py::arg("full_name"), py::arg("ic_passport_no"), py::arg("accounts"),
           py::arg("must_change") = false)
      .def("admin_reinitialize",
           [](PyBank& b, const std::string& t, const std::string& u) { b.bank().admin_reinitialize(t, u); },
           py::arg("token"), py::arg("username"))
      .def("balance", &PyBank::balance, py::arg("account_id"))
      .def("transfer", &PyBank::transfer, py::arg("token"), py::arg("source"), py::arg("target"),
           py::arg("amount"), py::arg("effective_date") = py::none())
      .def("run_value_date", &PyBank::run_value_date, py::arg("date"))
      .def("snapshot", &PyBank::snapshot, py::arg("mode"))
      .def("state_bytes", &PyBank::state_bytes)
      .def("request", &PyBank::request, py::arg("method"), py::arg("path"), py::arg("token") = "",
           py::arg("body") = "", py::arg("query") = std::map<std::string, std::string>{});
}
