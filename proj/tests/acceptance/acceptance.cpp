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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "bank/api.hpp"
#include "bank/backup.hpp"
#include "bank/bank.hpp"
#include "bank/journal.hpp"
#include "harness.hpp"

namespace bank::acceptance {
namespace {

namespace fs = std::filesystem;
using testing::Customer;
using testing::error_of;
using testing::kAdminPassword;
using testing::kAdminUser;
using testing::kPassword;
using testing::myr;
using testing::TempDir;
using testing::World;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

void no_password_ageing(BankOptions& o) { o.identity.policy.max_age_days.reset(); }

Date today(const World& w) { return Date::of(w.clock->now()); }

TransferRequest own_transfer(World& w, const std::string& token, AccountId from, AccountId to,
                             std::int64_t amount, std::optional<Date> when = std::nullopt) {
  TransferRequest r;
  r.source = from;
  r.target.kind = TransferTarget::Kind::own_account;
  r.target.account = to;
  r.amount = myr(amount);
  r.effective_date = when.value_or(today(w));
  r.tac = w->issue_tac(token);
  return r;
}

BillRequest bill(World& w, AccountId payer, std::int64_t amount, std::optional<Date> when = std::nullopt) {
  return BillRequest{payer, myr(amount), std::nullopt, when.value_or(today(w))};
}

// ------------------------------------------------------------------ 1

Outcome lockout() {
  // Production digest cost; only the session policy is pinned.
  auto clock = std::make_shared<ManualClock>(testing::start_time());
  BankOptions o;
  o.identity.policy.max_failed_attempts = 3;
  o.admin = AdminBootstrap{kAdminUser, kAdminPassword};
  o.clock = clock;
  Bank bank(o);
  bank.seed_customer({"Bob", "IC-bob", "", "", "", ""}, "bob", kPassword, false, {});
  const std::string admin = bank.login(kAdminUser, kAdminPassword).session.token;

  Stopwatch sw;
  std::vector<std::optional<ErrorCode>> seen;
  for (int i = 0; i < 3; ++i) seen.push_back(error_of([&] { bank.login("bob", "Wrong#pass1"); }));
  seen.push_back(error_of([&] { bank.login("bob", kPassword); }));
  bank.admin_reinitialize(admin, "bob");
  seen.push_back(error_of([&] { bank.login("bob", kPassword); }));
  const double elapsed = sw.seconds();

  const std::vector<std::optional<ErrorCode>> expected = {
      ErrorCode::INVALID_CREDENTIALS, ErrorCode::INVALID_CREDENTIALS, ErrorCode::INVALID_CREDENTIALS,
      ErrorCode::LOCKED, std::nullopt};
  if (seen != expected) return {false, "unexpected outcome sequence"};
  if (elapsed >= 1.0) return {false, "took " + fmt_seconds(elapsed)};
  return {true, "INVALID_CREDENTIALS x3, LOCKED, unlocked after reinitialize in " + fmt_seconds(elapsed)};
}

// ------------------------------------------------------------------ 2

Outcome timeout() {
  World w(std::nullopt, nullptr, [](BankOptions& o) { o.identity.idle_timeout_s = 60; });
  w.add_customer("dave", {testing::saving(1)});
  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };

  // A fresh session per idle value: heartbeats do not refresh activity, but
  // measuring each point from its own login keeps the points independent.
  for (int idle = 0; idle <= 60; ++idle) {
    const std::string t = w.login("dave");
    w.clock->advance_seconds(idle);
    const SessionMeta m = w->heartbeat(t);
    expect(m.remaining_s == 60 - idle, "remaining at idle " + std::to_string(idle));
    const bool want_warn = m.remaining_s > 0 && m.remaining_s <= 30;
    expect(m.warn == want_warn, "warn at idle " + std::to_string(idle));
    if (idle == 29) expect(!m.warn, "warn at idle 29");
    if (idle >= 31 && idle <= 59) expect(m.warn, "no warn at idle " + std::to_string(idle));
    w->logout(t);
  }
  {
    const std::string t = w.login("dave");
    w.clock->advance_seconds(61);
    expect(error_of([&] { w->heartbeat(t); }) == ErrorCode::SESSION_EXPIRED, "no expiry at idle 61");
  }
  {
    const std::string t = w.login("dave");
    w.clock->advance_seconds(59);
    const SessionMeta after = w->acknowledge_continue(t);
    expect(after.remaining_s == 60 && !after.warn, "continue at idle 59 did not reset");
    w.clock->advance_seconds(59);
    expect(w->heartbeat(t).remaining_s == 1, "continue did not restart the idle clock");
  }
  if (!problems.empty()) return {false, problems.front() + " (" + std::to_string(problems.size()) + " problems)"};
  return {true, "warn=false at 29s, warn=true at 31..59s, SESSION_EXPIRED at 61s, continue at 59s resets to 60"};
}

// ------------------------------------------------------------------ 3

Outcome retention() {
  World w(std::nullopt, nullptr, no_password_ageing);
  auto c = w.add_customer("rita", {testing::current(1'000'000'000), testing::saving(0)});
  const AccountId cur = c.accounts[0], sav = c.accounts[1];
  std::mt19937_64 rng(2026);

  struct Posted {
    EntryId id;
    Timestamp at;
    std::map<AccountId, std::int64_t> net;
  };
  struct Settled {
    InstructionId id;
    Timestamp at;
  };
  std::vector<Posted> posted;
  std::vector<Settled> transfers, bills;

  const Timestamp origin = w.clock->now();
  // Opening deposits are the only entries that exist before the first operation.
  for (AccountId acct : {cur, sav})
    for (const auto& item : w->history(c.token, acct, Date::of(origin), Date::of(origin)))
      posted.push_back({item.entry.id, item.entry.posted_at, {{acct, item.net.amount_minor}}});
  std::vector<std::int64_t> offsets;
  for (int i = 0; i < 500; ++i)
    offsets.push_back(static_cast<std::int64_t>(rng() % (200 * kMillisPerDay)));
  std::sort(offsets.begin(), offsets.end());

  std::size_t queries = 0, mismatches = 0, too_old = 0;
  auto check_queries = [&] {
    const Timestamp now = w.clock->now();
    const Timestamp floor{now.millis - 90 * kMillisPerDay};
    const Date d = Date::of(now);
    for (int q = 0; q < 4; ++q) {
      const Date from = d - static_cast<std::int32_t>(rng() % 250);
      const Date to = from + static_cast<std::int32_t>(rng() % 260);
      const Timestamp lo = std::max(from.start(), floor);
      const Timestamp hi = std::min(Timestamp{(to + 1).start().millis - 1}, now);
      auto within = [&](Timestamp at) { return at >= lo && at <= hi; };

      for (AccountId acct : {cur, sav}) {
        std::vector<std::tuple<Timestamp, EntryId, std::int64_t>> want;
        for (const Posted& p : posted)
          if (p.net.contains(acct) && within(p.at)) want.emplace_back(p.at, p.id, p.net.at(acct));
        std::sort(want.rbegin(), want.rend());
        const auto got = w->history(c.token, acct, from, to);
        ++queries;
        bool same = got.size() == want.size();
        for (std::size_t i = 0; same && i < got.size(); ++i)
          same = got[i].entry.id == std::get<1>(want[i]) &&
                 got[i].net.amount_minor == std::get<2>(want[i]);
        mismatches += !same;
        for (const auto& item : got) too_old += item.entry.posted_at < floor;
      }

      auto check_instructions = [&](const std::vector<Settled>& all, const auto& got) {
        std::vector<std::pair<Timestamp, InstructionId>> want;
        for (const Settled& s : all)
          if (within(s.at)) want.emplace_back(s.at, s.id);
        std::sort(want.rbegin(), want.rend());
        ++queries;
        bool same = got.size() == want.size();
        for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i].id == want[i].second;
        mismatches += !same;
        for (const auto& item : got) too_old += !item.settled_at || *item.settled_at < floor;
      };
      check_instructions(transfers, w->transfer_history(c.token, from, to));
      check_instructions(bills, w->bill_payment_history(c.token, from, to));
    }
  };

  for (std::size_t i = 0; i < offsets.size(); ++i) {
    w.clock->set(Timestamp{origin.millis + offsets[i]});
    c.token = w.login("rita");
    const std::int64_t amount = 1 + static_cast<std::int64_t>(rng() % 10'000);
    if (rng() % 4 == 0) {
      const auto p = w->open_payment(c.token, "Utility", "U-1", "", bill(w, cur, amount));
      posted.push_back({*p.executed_entry, w.clock->now(), {{cur, -amount}}});
      bills.push_back({p.id, *p.settled_at});
    } else {
      // Back to current only when savings can cover it.
      const bool back = rng() % 2 && w->ledger().balance(sav).amount_minor >= amount;
      const AccountId from = back ? sav : cur, to = back ? cur : sav;
      const auto t = w->create_transfer(c.token, own_transfer(w, c.token, from, to, amount));
      posted.push_back({*t.executed_entry, w.clock->now(), {{from, -amount}, {to, amount}}});
      transfers.push_back({t.id, *t.settled_at});
    }
    if (i % 10 == 9) check_queries();
  }
  w.clock->advance_days(30);
  c.token = w.login("rita");
  check_queries();

  if (mismatches || too_old)
    return {false, std::to_string(mismatches) + " oracle mismatches, " + std::to_string(too_old) +
                       " items older than 90 days over " + std::to_string(queries) + " queries"};
  return {true, std::to_string(posted.size()) + " entries over 200 days, " + std::to_string(queries) +
                    " queries equal the filter oracle, none older than 90 days"};
}

// ------------------------------------------------------------------ 4

Outcome beneficiary_cap() {
  World w;
  auto c = w.add_customer("bea", {testing::current(0)});
  std::mt19937_64 rng(404);
  std::set<std::string> model;
  std::size_t over = 0, diverged = 0;
  for (int i = 0; i < 10'000; ++i) {
    const std::string no = "EXT-" + std::to_string(rng() % 30);
    if (rng() % 3) {
      const auto err = error_of([&] { w->save_beneficiary(c.token, no, ""); });
      std::optional<ErrorCode> want;
      if (model.contains(no))
        want = ErrorCode::DUPLICATE_BENEFICIARY;
      else if (model.size() >= 10)
        want = ErrorCode::LIMIT_EXCEEDED;
      else
        model.insert(no);
      diverged += err != want;
    } else {
      const auto list = w->list_beneficiaries(c.token);
      if (!list.empty()) {
        const Beneficiary& victim = list[rng() % list.size()];
        w->delete_beneficiary(c.token, victim.id);
        model.erase(victim.account_no);
      }
    }
    const std::size_t n = w->list_beneficiaries(c.token).size();
    over += n > 10;
    diverged += n != model.size();
  }

  // Eleven simultaneous saves on an empty book: exactly one loses, with LIMIT_EXCEEDED.
  std::size_t bad_rounds = 0;
  for (int round = 0; round < 50; ++round) {
    auto r = w.add_customer("race" + std::to_string(round), {testing::current(0)});
    std::barrier sync(11);
    std::vector<std::optional<ErrorCode>> errs(11);
    std::vector<std::thread> threads;
    for (int t = 0; t < 11; ++t)
      threads.emplace_back([&, t] {
        sync.arrive_and_wait();
        errs[t] = error_of([&] { w->save_beneficiary(r.token, "R-" + std::to_string(t), ""); });
      });
    for (auto& t : threads) t.join();
    const auto losers = std::count(errs.begin(), errs.end(), ErrorCode::LIMIT_EXCEEDED);
    const auto winners = std::count(errs.begin(), errs.end(), std::nullopt);
    bad_rounds += !(losers == 1 && winners == 10 && w->list_beneficiaries(r.token).size() == 10);
    // And with the book already full the next save always fails the same way.
    bad_rounds += error_of([&] { w->save_beneficiary(r.token, "R-late", ""); }) != ErrorCode::LIMIT_EXCEEDED;
  }

  if (over || diverged || bad_rounds)
    return {false, std::to_string(over) + " over-cap observations, " + std::to_string(diverged) +
                       " model divergences, " + std::to_string(bad_rounds) + " bad concurrent rounds"};
  return {true, "10000 ops never above 10, 50 concurrent rounds each reject exactly the 11th save"};
}

// ------------------------------------------------------------------ 5

Outcome conservation() {
  World w(std::nullopt, nullptr, no_password_ageing);
  std::mt19937_64 rng(5005);
  struct Holder {
    Customer c;
    std::vector<BeneficiaryId> beneficiaries;
  };
  std::vector<Holder> holders;
  std::vector<AccountId> accounts;
  for (int i = 0; i < 5; ++i) {
    std::vector<AccountSpec> specs;
    for (int k = 0; k < 4; ++k) {
      const std::int64_t opening = static_cast<std::int64_t>(rng() % 2'000'000);
      specs.push_back(k % 2 ? testing::saving(opening) : testing::current(opening));
    }
    Holder h{w.add_customer("user" + std::to_string(i), specs), {}};
    for (int b = 0; b < 3; ++b)
      h.beneficiaries.push_back(
          w->save_beneficiary(h.c.token, "EXT-" + std::to_string(i) + "-" + std::to_string(b), "").id);
    for (AccountId a : h.c.accounts) accounts.push_back(a);
    holders.push_back(std::move(h));
  }

  std::map<AccountId, std::int64_t> oracle;
  for (AccountId a : accounts) oracle[a] = w->ledger().balance(a).amount_minor;
  oracle[kClearingAccount] = w->ledger().balance(kClearingAccount).amount_minor;

  auto global_sums = [&] {
    std::map<std::string, std::int64_t> sums;
    for (const auto& [a, _] : oracle) {
      const Account& acct = w->ledger().account(a);
      sums[std::string(acct.currency.code())] += w->ledger().posted_sum(a);
    }
    return sums;
  };
  const auto initial = global_sums();

  // Cheque leaves issued per current account, and the next one to present.
  std::map<AccountId, std::pair<std::uint64_t, std::uint64_t>> leaves;
  std::size_t sum_breaks = 0, fold_breaks = 0, outcome_breaks = 0;
  std::map<std::string, int> ops;
  const std::string admin = w.admin();

  for (int i = 0; i < 10'000; ++i) {
    Holder& h = holders[rng() % holders.size()];
    const std::int64_t amount = 1 + static_cast<std::int64_t>(rng() % 400'000);
    const AccountId from = h.c.accounts[rng() % 4];
    const bool can_pay = oracle[from] >= amount;
    switch (rng() % 4) {
      case 0: {
        AccountId to = h.c.accounts[rng() % 4];
        if (to == from) to = h.c.accounts[(std::find(h.c.accounts.begin(), h.c.accounts.end(), from) -
                                           h.c.accounts.begin() + 1) % 4];
        const auto err = error_of([&] { w->create_transfer(h.c.token, own_transfer(w, h.c.token, from, to, amount)); });
        outcome_breaks += err.has_value() == can_pay;
        if (can_pay) oracle[from] -= amount, oracle[to] += amount;
        ++ops["own"];
        break;
      }
      case 1: {
        TransferRequest r = own_transfer(w, h.c.token, from, AccountId{}, amount);
        r.target.kind = TransferTarget::Kind::beneficiary;
        r.target.beneficiary = h.beneficiaries[rng() % h.beneficiaries.size()];
        const auto err = error_of([&] { w->create_transfer(h.c.token, r); });
        outcome_breaks += err.has_value() == can_pay;
        if (can_pay) oracle[from] -= amount, oracle[kClearingAccount] += amount;
        ++ops["beneficiary"];
        break;
      }
      case 2: {
        const auto err = error_of([&] { w->open_payment(h.c.token, "Telco", "T-1", "", bill(w, from, amount)); });
        outcome_breaks += err.has_value() == can_pay;
        if (can_pay) oracle[from] -= amount, oracle[kClearingAccount] += amount;
        ++ops["bill"];
        break;
      }
      default: {
        const AccountId chq = h.c.accounts[2 * (rng() % 2)];  // a current account
        auto& [next, end] = leaves[chq];
        if (next == end) {
          const auto req = w->request_cheque_book(h.c.token, chq, 50);
          const auto book = w->admin_dispatch_cheque_book(admin, req.id);
          next = std::stoull(*book.first_cheque_no);
          end = next + 50;
        }
        const bool covered = oracle[chq] >= amount;
        const Cheque c = w->admin_present_cheque(admin, chq, format_cheque_no(next++), myr(amount));
        outcome_breaks += (c.status == ChequeStatus::paid) != covered;
        if (covered) oracle[chq] -= amount, oracle[kClearingAccount] += amount;
        ++ops["cheque"];
        break;
      }
    }
    sum_breaks += global_sums() != initial;
    for (const auto& [a, want] : oracle) fold_breaks += w->ledger().balance(a).amount_minor != want;
  }

  if (sum_breaks || fold_breaks || outcome_breaks)
    return {false, std::to_string(sum_breaks) + " sum changes, " + std::to_string(fold_breaks) +
                       " balance mismatches, " + std::to_string(outcome_breaks) + " outcome mismatches"};
  std::ostringstream out;
  out << "10000 ops (own " << ops["own"] << ", beneficiary " << ops["beneficiary"] << ", bill "
      << ops["bill"] << ", cheque " << ops["cheque"] << ") over " << accounts.size()
      << " accounts; sums constant, balances equal the fold oracle";
  return {true, out.str()};
}

// ------------------------------------------------------------------ 6

Outcome scheduler() {
  std::mt19937_64 rng(6006);
  std::size_t report_breaks = 0, balance_breaks = 0, rerun_breaks = 0, items_total = 0;
  Stopwatch sw;
  for (int round = 0; round < 100; ++round) {
    World w;
    auto c = w.add_customer("u", {testing::current(static_cast<std::int64_t>(rng() % 5'000)),
                                  testing::current(static_cast<std::int64_t>(rng() % 5'000)),
                                  testing::saving(static_cast<std::int64_t>(rng() % 5'000))});
    const Date d = today(w);
    struct Item {
      Date date;
      InstructionId id;
      AccountId from;
      std::optional<AccountId> to;
      std::int64_t amount;
    };
    std::vector<Item> items;
    const int n = 10 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      const std::size_t fi = rng() % 3;
      const AccountId from = c.accounts[fi];
      const Date when = d + 1 + static_cast<std::int32_t>(rng() % 6);
      const std::int64_t amount = 1 + static_cast<std::int64_t>(rng() % 2'000);
      if (rng() % 2) {
        const AccountId to = c.accounts[(fi + 1 + rng() % 2) % 3];
        items.push_back({when, w->create_transfer(c.token, own_transfer(w, c.token, from, to, amount, when)).id,
                         from, to, amount});
      } else {
        items.push_back({when, w->open_payment(c.token, "P", "1", "", bill(w, from, amount, when)).id, from,
                         std::nullopt, amount});
      }
    }
    items_total += items.size();
    std::sort(items.begin(), items.end(),
              [](const Item& x, const Item& y) { return std::tie(x.date, x.id) < std::tie(y.date, y.id); });

    std::map<AccountId, std::int64_t> bal;
    for (AccountId a : c.accounts) bal[a] = w->ledger().balance(a).amount_minor;
    std::size_t next = 0;
    std::vector<Date> processed;
    // A random increasing subset of business dates, always ending past the last item.
    for (Date run = d + 1; run <= d + 7; run = run + 1) {
      if (run != d + 7 && rng() % 2) continue;
      std::vector<InstructionId> executed, failed;
      for (; next < items.size() && items[next].date <= run; ++next) {
        const Item& it = items[next];
        if (bal[it.from] >= it.amount) {
          bal[it.from] -= it.amount;
          if (it.to) bal[*it.to] += it.amount;
          executed.push_back(it.id);
        } else {
          failed.push_back(it.id);
        }
      }
      const ExecutionReport report = w->run_value_date(run);
      report_breaks += report.executed != executed || report.failed != failed;
      processed.push_back(run);
    }
    for (AccountId a : c.accounts) balance_breaks += w->ledger().balance(a).amount_minor != bal[a];

    // Re-running processed dates changes nothing.
    const std::string before = w->state_bytes();
    for (Date p : processed) {
      std::optional<ExecutionReport> again;
      const auto err = error_of([&] { again = w->run_value_date(p); });
      if (p == processed.back())
        rerun_breaks += err.has_value() || !again->already_processed || !again->executed.empty() ||
                        !again->failed.empty();
      else
        rerun_breaks += err != ErrorCode::DATE_REGRESSION;
      rerun_breaks += w->state_bytes() != before;
    }
  }
  const double elapsed = sw.seconds();
  if (report_breaks || balance_breaks || rerun_breaks || elapsed >= 10.0)
    return {false, std::to_string(report_breaks) + " report mismatches, " + std::to_string(balance_breaks) +
                       " balance mismatches, " + std::to_string(rerun_breaks) + " re-run changes, " +
                       fmt_seconds(elapsed)};
  return {true, "100 sets (" + std::to_string(items_total) +
                    " instructions) equal the (date, id) oracle, re-runs change nothing, " + fmt_seconds(elapsed)};
}

// ------------------------------------------------------------------ 7

Outcome crash_fuzz() {
  TempDir dir;
  auto clock = std::make_shared<ManualClock>(testing::start_time());
  // State after each committed sequence number, as the running process saw it.
  std::map<std::uint64_t, std::string> states;
  {
    BankOptions o = testing::test_options(clock);
    o.admin.reset();
    states[0] = Bank(o).state_bytes();
  }
  {
    World w(dir.path(), clock, no_password_ageing);
    states[w->health().journal_seq] = w->state_bytes();
    // Observe every commit through the public surface: traffic in single steps.
    std::mt19937_64 rng(7007);
    auto observe = [&] { states[w->health().journal_seq] = w->state_bytes(); };
    auto a = w.add_customer("alice", {testing::current(5'000'000), testing::saving(10'000)});
    observe();
    for (int i = 0; i < 150; ++i) {
      const std::int64_t amount = 1 + static_cast<std::int64_t>(rng() % 900'000);
      switch (rng() % 4) {
        case 0:
          error_of([&] { w->create_transfer(a.token, own_transfer(w, a.token, a.accounts[0], a.accounts[1], amount)); });
          break;
        case 1:
          error_of([&] { w->open_payment(a.token, "Water", "W-1", "", bill(w, a.accounts[1], amount)); });
          break;
        case 2:
          error_of([&] {
            w->create_transfer(a.token, own_transfer(w, a.token, a.accounts[0], a.accounts[1], amount, today(w) + 1));
          });
          break;
        default:
          w.clock->advance_days(1);
          a.token = w.login("alice");
          error_of([&] { w->run_value_date(today(w)); });
          break;
      }
      observe();
    }
  }

  const fs::path journal = dir / persist::kJournalFile;
  const auto scan = persist::scan_journal(journal);
  std::vector<std::uint64_t> ends{0};  // byte offset after each record
  for (const auto& r : scan.records)
    ends.push_back(ends.back() + persist::kRecordHeaderBytes + r.payload.size() + persist::kRecordTrailerBytes);
  for (std::uint64_t s = 0; s <= scan.records.size(); ++s)
    if (!states.contains(s)) return {false, "no observed state for seq " + std::to_string(s)};

  std::ifstream in(journal, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  std::mt19937_64 rng(7777);
  std::size_t failures = 0, mid_record = 0;
  std::string first_failure;
  for (int i = 0; i < 200; ++i) {
    std::uint64_t cut = rng() % (bytes.size() + 1);
    if (i % 4 == 0) {  // exactly on a record boundary
      cut = ends[rng() % ends.size()];
    }
    const auto full = static_cast<std::uint64_t>(std::upper_bound(ends.begin(), ends.end(), cut) - ends.begin() - 1);
    const bool torn = cut != ends[full];
    mid_record += torn;

    TempDir crash;
    {
      std::ofstream out(crash / persist::kJournalFile, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(cut));
    }
    BankOptions o = testing::test_options(clock, crash.path());
    o.admin.reset();
    o.read_only = true;
    std::string why;
    try {
      Bank recovered(o);
      const auto& rep = recovered.recovery_report();
      if (rep.discarded_tail != (torn ? 1u : 0u)) why = "discarded " + std::to_string(rep.discarded_tail);
      else if (rep.events != full) why = "replayed " + std::to_string(rep.events) + " of " + std::to_string(full);
      else if (recovered.state_bytes() != states.at(full)) why = "state differs from replay oracle";
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (!why.empty()) {
      ++failures;
      if (first_failure.empty()) first_failure = "cut " + std::to_string(cut) + ": " + why;
    }
  }
  if (failures) return {false, std::to_string(failures) + " of 200 cut points failed; " + first_failure};
  return {true, "200 cut points (" + std::to_string(mid_record) + " mid-record, " + std::to_string(200 - mid_record) + " on a boundary) over " +
                    std::to_string(scan.records.size()) + " records recover to the replay oracle"};
}

// ------------------------------------------------------------------ 8

Outcome backup_chain() {
  std::mt19937_64 rng(8008);
  auto clock = std::make_shared<ManualClock>(testing::start_time());
  std::size_t failures = 0, snapshots = 0, compactions = 0;
  std::string first_failure;
  auto note = [&](int round, const std::string& why) {
    ++failures;
    if (first_failure.empty()) first_failure = "schedule " + std::to_string(round) + ": " + why;
  };
  for (int round = 0; round < 50; ++round) {
    TempDir dir, plain, offsite;
    const std::uint64_t seed = rng();
    std::string expected;
    {
      World w(dir.path(), clock, no_password_ageing);
      World replay(plain.path(), clock, no_password_ageing);
      std::mt19937_64 ops_a(seed), ops_b(seed);
      // Same traffic in both banks; only one of them takes snapshots.
      auto ca = w.add_customer("alice", {testing::current(10'000'000), testing::saving(0)});
      auto cb = replay.add_customer("alice", {testing::current(10'000'000), testing::saving(0)});
      auto step = [](World& bank, Customer& c, std::mt19937_64& r) {
        const std::int64_t amount = 1 + static_cast<std::int64_t>(r() % 5'000);
        if (r() % 3 == 0)
          error_of([&] { bank->open_payment(c.token, "Gas", "G-1", "", bill(bank, c.accounts[0], amount)); });
        else
          error_of([&] {
            bank->create_transfer(c.token, own_transfer(bank, c.token, c.accounts[r() % 2], c.accounts[0], amount));
          });
      };
      const int complete_at = static_cast<int>(rng() % 4);
      bool have_base = false;
      for (int s = 0; s < 10; ++s) {
        const int n = static_cast<int>(rng() % 5);
        for (int k = 0; k < n; ++k) {
          step(w, ca, ops_a);
          step(replay, cb, ops_b);
        }
        std::optional<persist::SnapshotMode> mode;
        if (s == complete_at || (have_base && rng() % 5 == 0))
          mode = persist::SnapshotMode::complete;
        else if (have_base && rng() % 2)
          mode = persist::SnapshotMode::incremental;
        if (mode) {
          w->snapshot(*mode);
          have_base = true;
          ++snapshots;
        }
        if (have_base && rng() % 3 == 0) {
          w->compact_journal();
          ++compactions;
        }
      }
      for (int k = 0; k < 3; ++k) {  // journal tail past the last snapshot
        step(w, ca, ops_a);
        step(replay, cb, ops_b);
      }
      expected = w->state_bytes();
    }

    World again(dir.path(), clock);
    World journal_only(plain.path(), clock);
    if (again->state_bytes() != expected) {
      note(round, "chain recovery differs from the running state");
      continue;
    }
    if (!again->recovery_report().snapshot_id) note(round, "recovery did not use a snapshot");
    if (testing::business_state(*again) != testing::business_state(*journal_only)) {
      note(round, "chain recovery differs from journal replay");
      continue;
    }
    again->offsite_copy(offsite.path());
    if (error_of([&] { persist::verify_offsite(offsite.path()); })) {
      note(round, "offsite copy does not verify");
      continue;
    }
    World restored(offsite.path(), clock);
    if (restored->state_bytes() != again->state_bytes()) note(round, "offsite copy recovers differently");
  }
  if (failures) return {false, std::to_string(failures) + " of 50 schedules failed; " + first_failure};
  return {true, "50 schedules (" + std::to_string(snapshots) + " snapshots, " + std::to_string(compactions) +
                    " compactions) equal journal replay; offsite copies verify and recover identically"};
}

// ------------------------------------------------------------------ 9

Outcome message_fidelity() {
  World w;
  w.add_customer("mia", {testing::saving(1)});
  api::Router router(*w);
  auto post = [&](const std::string& path, const std::string& token, const api::Json& body) {
    api::Request r;
    r.method = "POST";
    r.path = path;
    if (!token.empty()) r.authorization = "Bearer " + token;
    r.body = body.dump();
    return router.handle(r);
  };
  std::vector<std::string> problems;

  for (auto [user, pw] : {std::pair{"mia", "Wrong#pass1"}, std::pair{"nobody", kPassword}}) {
    const auto res = post("/login", "", {{"username", user}, {"password", pw}});
    if (res.body["error"]["message"] != "Alert Invalid Username and Password")
      problems.push_back("failed login message for " + std::string(user));
  }
  const auto ok = post("/login", "", {{"username", "mia"}, {"password", kPassword}});
  const std::string token = ok.body["data"]["token"].get<std::string>();
  if (ok.body.dump().find("welcome to the internet banking system") == std::string::npos)
    problems.push_back("welcome text missing");
  const auto out = post("/logout", token, api::Json::object());
  const std::string bye = out.body["data"]["message"].get<std::string>();
  if (bye.find("logged out successfully") == std::string::npos) problems.push_back("logout text: " + bye);

  // The permitted special characters, one at a time and all together.
  const std::string specials = "!@#%&^&*()_+=[{}|\\:;'\",<.>/?";
  const PasswordPolicy policy;
  for (char c : specials) {
    const std::string candidate = std::string("abcdefg1") + c;
    const auto first = check_password(policy, candidate);
    if (!first.empty()) problems.push_back(std::string("rejected special '") + c + "'");
    for (int k = 0; k < 3; ++k)
      if (check_password(policy, candidate) != first) problems.push_back("nondeterministic verdict");
  }
  const std::string all = "Ab1" + specials;
  const std::string t = w.login("mia");
  if (error_of([&] { w->change_password(t, "IC-mia", all); })) problems.push_back("full special set refused");
  if (error_of([&] { w->login("mia", all); })) problems.push_back("login with full special set failed");

  if (!problems.empty()) return {false, problems.front()};
  return {true, "exact failure alert, welcome and logout texts, all " + std::to_string(specials.size()) +
                    " special characters accepted deterministically"};
}

// ------------------------------------------------------------------ 10

/// Identifying leaves of a response body, qualified by route pattern and key.
void identifying(const api::Json& j, const std::string& route, const std::string& key,
                 std::set<std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) identifying(v, route, k, out);
  } else if (j.is_array()) {
    for (const auto& v : j) identifying(v, route, key, out);
  } else if (!key.empty()) {
    const bool ident = key == "id" || key.ends_with("_id") || key.ends_with("_no") ||
                       key == "holder_name" || key == "nickname" || key == "email" ||
                       key == "full_name" || key == "username" || key == "phone" ||
                       key == "postal_address" || key == "description";
    if (ident) out.insert(route + "|" + key + "=" + (j.is_string() ? j.get<std::string>() : j.dump()));
  }
}

Outcome tenancy() {
  World w(std::nullopt, nullptr, no_password_ageing);
  api::Router router(*w);
  struct Tenant {
    Customer c;
    std::string tag;
  };
  std::vector<Tenant> tenants;
  for (const std::string tag : {"ann", "ben"}) {
    Tenant t{w.add_customer(tag, {testing::current(900'000), testing::saving(100)}), tag};
    auto& c = t.c;
    w->save_beneficiary(c.token, "EXT-" + tag, "nick-" + tag);
    // Same corporation for both; the bill account and holder are tenant specific.
    w->register_biller(c.token, "Shared Utility", "BILL-" + tag, "Holder-" + tag);
    w->create_transfer(c.token, own_transfer(w, c.token, c.accounts[0], c.accounts[1], 10));
    w->create_transfer(c.token, own_transfer(w, c.token, c.accounts[0], c.accounts[1], 20, today(w) + 3));
    w->open_payment(c.token, "Shared Utility", "BILL-" + tag, "Holder-" + tag, bill(w, c.accounts[0], 5));
    w->open_payment(c.token, "Shared Utility", "BILL-" + tag, "Holder-" + tag, bill(w, c.accounts[0], 6, today(w) + 2));
    const auto book = w->request_cheque_book(c.token, c.accounts[0], 25);
    w->admin_dispatch_cheque_book(w.admin(), book.id);
    w->admin_present_cheque(w.admin(), c.accounts[0], "000001", myr(7));
    w->stop_cheque(c.token, c.accounts[0], "000002");
    tenants.push_back(std::move(t));
  }

  std::vector<std::string> gets;
  for (const std::string& r : router.routes())
    if (r.starts_with("GET ")) gets.push_back(r.substr(4));

  auto call = [&](const std::string& pattern, const Tenant& as, AccountId account, const std::string& cheque) {
    api::Request r;
    r.method = "GET";
    r.path = pattern;
    if (auto at = r.path.find("{id}"); at != std::string::npos) r.path.replace(at, 4, account.str());
    if (auto at = r.path.find("{no}"); at != std::string::npos) {
      r.path.replace(at, 4, cheque);
      r.query["account_id"] = account.str();
    }
    r.authorization = "Bearer " + as.c.token;
    return router.handle(r);
  };

  // What each tenant legitimately sees when every GET route targets its own objects.
  std::vector<std::set<std::string>> visible(2);
  for (std::size_t t = 0; t < 2; ++t)
    for (const std::string& pattern : gets)
      for (AccountId a : tenants[t].c.accounts)
        for (const std::string& no : {"000001", "000002", "000003"}) {
          const auto res = call(pattern, tenants[t], a, no);
          if (res.status == 200) identifying(res.body["data"], pattern, "", visible[t]);
        }
  std::vector<std::set<std::string>> foreign_only(2);
  for (std::size_t t = 0; t < 2; ++t)
    std::set_difference(visible[1 - t].begin(), visible[1 - t].end(), visible[t].begin(), visible[t].end(),
                        std::inserter(foreign_only[t], foreign_only[t].end()));
  if (foreign_only[0].empty() || foreign_only[1].empty()) return {false, "tenants are indistinguishable"};

  std::mt19937_64 rng(1010);
  std::size_t violations = 0, object_probes = 0;
  std::string first;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t me = rng() % 2;
    const Tenant& as = tenants[me];
    const Tenant& other = tenants[1 - me];
    const std::string& pattern = gets[rng() % gets.size()];
    const bool aim_foreign = rng() % 2;
    const AccountId account = (aim_foreign ? other : as).c.accounts[rng() % 2];
    const std::string cheque = format_cheque_no(1 + rng() % 3);
    const auto res = call(pattern, as, account, cheque);

    const bool targets_object = pattern.find('{') != std::string::npos;
    if (targets_object && aim_foreign) {
      ++object_probes;
      if (res.status == 200) {
        ++violations;
        if (first.empty()) first = pattern + " served a foreign object";
      }
    }
    if (pattern.starts_with("/admin/") && res.status == 200) {
      ++violations;
      if (first.empty()) first = pattern + " served a customer";
    }
    std::set<std::string> seen;
    if (res.body.contains("data")) identifying(res.body["data"], pattern, "", seen);
    for (const auto& leaf : seen)
      if (foreign_only[me].contains(leaf)) {
        ++violations;
        if (first.empty()) first = leaf;
      }
    const std::string dump = res.body.dump();
    for (const std::string& marker : {"EXT-" + other.tag, "BILL-" + other.tag, "Holder-" + other.tag})
      if (dump.find(marker) != std::string::npos) {
        ++violations;
        if (first.empty()) first = marker + " via " + pattern;
      }
  }
  if (violations) return {false, std::to_string(violations) + " violations in 1000 probes; " + first};
  return {true, "0 violations in 1000 probes over " + std::to_string(gets.size()) + " GET routes (" +
                    std::to_string(object_probes) + " aimed at foreign objects)"};
}

}  // namespace
}  // namespace bank::acceptance

int main() {
  using namespace bank::acceptance;
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"lockout", lockout},
      {"session timeout", timeout},
      {"history retention", retention},
      {"beneficiary cap", beneficiary_cap},
      {"ledger conservation", conservation},
      {"value-date scheduler", scheduler},
      {"crash recovery fuzz", crash_fuzz},
      {"backup chain", backup_chain},
      {"message fidelity", message_fidelity},
      {"tenancy isolation", tenancy},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
