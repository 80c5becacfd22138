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

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>

#include "bank/api.hpp"
#include "bank/error.hpp"

namespace {

using bank::api::Json;
namespace fs = std::filesystem;

struct Common {
  std::optional<fs::path> config;
  std::optional<fs::path> data_dir;
};

bank::api::ServerConfig resolve(const Common& c, bool need_data_dir) {
  bank::api::ServerConfig cfg;
  const char* env = std::getenv("BANK_CONFIG");
  if (c.config || (env && *env)) cfg = bank::api::load_config(bank::api::config_path(c.config));
  if (c.data_dir) cfg.data_dir = *c.data_dir;
  if (need_data_dir && !cfg.data_dir)
    bank::fail(bank::ErrorCode::CONFIG_INVALID, "no data directory (use --data-dir or a config)");
  return cfg;
}

Json report_json(const bank::persist::RecoveryReport& r) {
  return {{"events", r.events},
          {"discarded_tail", r.discarded_tail},
          {"snapshot_id", r.snapshot_id ? Json(*r.snapshot_id) : Json(nullptr)},
          {"last_seq", r.last_seq},
          {"warnings", r.warnings}};
}

Json snapshot_json(const bank::persist::SnapshotInfo& s) {
  return {{"snapshot_id", s.id},
          {"mode", std::string(bank::persist::to_string(s.mode))},
          {"base_snapshot_id", s.base_id ? Json(*s.base_id) : Json(nullptr)},
          {"upto_seq", s.upto_seq}};
}

int serve(const Common& common) {
  auto cfg = resolve(common, false);
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  bank::Bank b(cfg.bank_options());
  bank::api::Server server(cfg, b);
  server.start();
  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {}, shutting down", sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Internet banking server and operator tools"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON config file (BANK_CONFIG overrides)");
    sub->add_option("--data-dir", common.data_dir, "Data directory");
  };

  auto* serve_cmd = app.add_subcommand("serve", "Run the JSON API server");
  add_common(serve_cmd);

  bool verify = false;
  auto* recover_cmd = app.add_subcommand("recover", "Recover state from a data directory and report");
  add_common(recover_cmd);
  recover_cmd->add_flag("--verify", verify,
                        "Read-only: check snapshots, journal and any off-site manifest");

  std::string mode = "complete";
  auto* backup_cmd = app.add_subcommand("backup", "Take a snapshot");
  add_common(backup_cmd);
  backup_cmd->add_option("--mode", mode)->check(CLI::IsMember({"complete", "incremental"}));

  fs::path target;
  auto* offsite_cmd = app.add_subcommand("offsite", "Copy the data directory off-site and verify");
  add_common(offsite_cmd);
  offsite_cmd->add_option("--target", target)->required();

  std::string date_text;
  auto* run_cmd = app.add_subcommand("run-value-date", "Execute instructions due on DATE");
  add_common(run_cmd);
  run_cmd->add_option("DATE", date_text, "YYYY-MM-DD")->required();

  fs::path fixture;
  auto* seed_cmd = app.add_subcommand("seed", "Load customers and accounts from a fixture");
  add_common(seed_cmd);
  seed_cmd->add_option("--fixture", fixture)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(common);

    auto cfg = resolve(common, true);
    auto options = cfg.bank_options();
    if (*recover_cmd) {
      options.read_only = verify;
      if (verify) options.admin.reset();
      bank::Bank b(options);
      Json out = report_json(b.recovery_report());
      if (verify && fs::exists(*cfg.data_dir / bank::persist::kOffsiteManifest)) {
        const auto r = bank::persist::verify_offsite(*cfg.data_dir);
        out["offsite_files_verified"] = r.files.size();
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    bank::Bank b(options);
    if (*backup_cmd) {
      const auto s = b.snapshot(*bank::persist::parse_snapshot_mode(mode));
      std::cout << snapshot_json(s).dump(2) << "\n";
    } else if (*offsite_cmd) {
      const auto r = b.offsite_copy(target);
      std::cout << Json{{"target", r.target.string()}, {"files", r.files.size()}, {"bytes", r.bytes}}.dump(2)
                << "\n";
    } else if (*run_cmd) {
      auto date = bank::Date::parse(date_text);
      if (!date) bank::fail(bank::ErrorCode::SCHEMA_VIOLATION, "DATE must be YYYY-MM-DD");
      const auto r = b.run_value_date(*date);
      Json executed = Json::array(), failed = Json::array();
      for (auto id : r.executed) executed.push_back(id.value);
      for (auto id : r.failed) failed.push_back(id.value);
      std::cout << Json{{"business_date", r.business_date.to_string()},
                        {"already_processed", r.already_processed},
                        {"executed", executed},
                        {"failed", failed}}
                       .dump(2)
                << "\n";
    } else if (*seed_cmd) {
      std::ifstream in(fixture);
      const auto report = bank::api::seed_fixture(b, Json::parse(in));
      Json customers = Json::array();
      for (const auto& c : report.customers) {
        Json accounts = Json::array();
        for (auto a : c.accounts) accounts.push_back(std::to_string(a.value));
        customers.push_back({{"customer_id", std::to_string(c.customer.value)}, {"account_ids", accounts}});
      }
      std::cout << Json{{"customers", customers}}.dump(2) << "\n";
    }
    return 0;
  } catch (const bank::Error& e) {
    std::cerr << "error: " << bank::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
