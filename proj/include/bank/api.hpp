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

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bank/bank.hpp"

namespace bank::api {

using Json = nlohmann::json;

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  /// Value of the Authorization header ("Bearer <token>"), if any.
  std::string authorization;
  std::string body;
};

struct Response {
  int status = 200;
  Json body;
  std::map<std::string, std::string> headers;
};

/// Maps HTTP requests onto Bank operations, one route per operation.
/// Independent of any socket layer so tests can drive it in-process.
class Router {
 public:
  explicit Router(Bank& bank);
  ~Router();

  Response handle(const Request& req);

  /// "METHOD /pattern" for every route, in table order.
  std::vector<std::string> routes() const;

 private:
  struct Route;
  struct Context;

  void add(std::string method, std::string pattern, bool authenticated,
           std::function<Json(Context&)> fn);

  Bank& bank_;
  std::vector<Route> routes_;
};

struct ServerConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::optional<std::filesystem::path> data_dir;
  IdentityConfig identity;
  PaymentsConfig payments;
  persist::BackupConfig backup;
  bool backup_enabled = false;
  std::optional<AdminBootstrap> admin;

  BankOptions bank_options(std::shared_ptr<Clock> clock = nullptr) const;
};

/// Parses and validates a JSON config document. Throws CONFIG_INVALID.
ServerConfig parse_config(const Json& doc);
ServerConfig load_config(const std::filesystem::path& file);
/// BANK_CONFIG when set, otherwise `fallback`.
std::filesystem::path config_path(const std::optional<std::filesystem::path>& fallback);

struct SeedReport {
  std::vector<NewCustomer> customers;
};

/// Fixture format: {"customers": [{"username", "password", "full_name",
/// "ic_passport_no", ..., "must_change", "accounts": [{"kind",
/// "opening_balance", "credit_limit"}]}]}. Amounts are minor units.
SeedReport seed_fixture(Bank& bank, const Json& fixture);

/// Blocks until stop() (or a signal handled by the caller) ends the server.
/// Runs the session sweeper, the daily value-date run and backup ticks.
class Server {
 public:
  Server(ServerConfig config, Bank& bank);
  ~Server();

  /// Returns the bound port (useful with listen_port 0).
  int start();
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bank::api
