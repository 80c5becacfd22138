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

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <condition_variable>
#include <thread>

#include "bank/api.hpp"
#include "bank/error.hpp"

namespace bank::api {

namespace {

constexpr auto kHousekeepingPeriod = std::chrono::seconds(1);

}  // namespace

struct Server::Impl {
  ServerConfig config;
  Bank& bank;
  Router router;
  httplib::Server http;
  std::thread listener;
  std::thread housekeeper;
  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;
  std::optional<persist::BackupScheduler> backups;

  Impl(ServerConfig c, Bank& b) : config(std::move(c)), bank(b), router(b) {
    if (config.backup_enabled)
      backups.emplace(config.backup,
                      persist::BackupHooks{
                          [this](persist::SnapshotMode m) { return bank.snapshot(m); },
                          [this](const std::filesystem::path& t) { bank.offsite_copy(t); }});
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      Request r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query[k] = v;
      r.authorization = req.get_header_value("Authorization");
      r.body = req.body;
      const Response out = router.handle(r);
      res.status = out.status;
      for (const auto& [k, v] : out.headers) res.set_header(k, v);
      res.set_content(out.body.dump(), "application/json");
      spdlog::info("{} {} -> {}", req.method, req.path, out.status);
    };
    const std::string any = R"(/.*)";
    http.Get(any, handler);
    http.Post(any, handler);
    http.Put(any, handler);
    http.Delete(any, handler);
  }

  void housekeeping() {
    std::unique_lock lock(mu);
    while (!stopping) {
      lock.unlock();
      try {
        bank.sweep_sessions();
        const Date today = Date::of(bank.now());
        const auto last = bank.payments().last_processed();
        if (!last || *last < today) {
          const ExecutionReport r = bank.run_value_date(today);
          spdlog::info("value date {}: {} executed, {} failed", today.to_string(),
                       r.executed.size(), r.failed.size());
        }
        if (backups) backups->tick(bank.now());
      } catch (const std::exception& e) {
        spdlog::error("housekeeping: {}", e.what());
      }
      lock.lock();
      cv.wait_for(lock, kHousekeepingPeriod, [this] { return stopping; });
    }
  }
};

Server::Server(ServerConfig config, Bank& bank)
    : impl_(std::make_unique<Impl>(std::move(config), bank)) {}

Server::~Server() { stop(); }

int Server::start() {
  int port = impl_->config.listen_port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(impl_->config.listen_host);
  } else if (!impl_->http.bind_to_port(impl_->config.listen_host, port)) {
    port = -1;
  }
  if (port < 0)
    fail(ErrorCode::CONFIG_INVALID, "cannot listen on " + impl_->config.listen_host + ":" +
                                        std::to_string(impl_->config.listen_port));
  impl_->listener = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->housekeeper = std::thread([this] { impl_->housekeeping(); });
  spdlog::info("listening on {}:{}", impl_->config.listen_host, port);
  return port;
}

void Server::wait() {
  if (impl_->listener.joinable()) impl_->listener.join();
}

void Server::stop() {
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->http.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  if (impl_->housekeeper.joinable()) impl_->housekeeper.join();
}

}  // namespace bank::api
