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

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bank/backup.hpp"
#include "bank/cheques.hpp"
#include "bank/events.hpp"
#include "bank/identity.hpp"
#include "bank/journal.hpp"
#include "bank/ledger.hpp"
#include "bank/payments.hpp"
#include "bank/recovery.hpp"
#include "bank/time.hpp"

namespace bank {

struct AdminBootstrap {
  std::string username;
  std::string password;
};

struct BankOptions {
  IdentityConfig identity;
  PaymentsConfig payments;
  /// No data directory: state lives in memory only.
  std::optional<std::filesystem::path> data_dir;
  persist::JournalOptions journal;
  /// Recover and serve reads, refuse every mutation.
  bool read_only = false;
  std::optional<AdminBootstrap> admin;
  std::shared_ptr<Clock> clock;  // SystemClock when null
};

struct AccountSpec {
  AccountKind kind = AccountKind::saving;
  /// Funds for current/saving, amount owed for a credit card.
  Money opening_balance;
  Money credit_limit;  // credit card only
};

struct AccountView {
  Account account;
  Money balance;
};

struct NewCustomer {
  CustomerId customer;
  std::vector<AccountId> accounts;
};

struct EntryPage {
  std::vector<LedgerEntry> items;
  std::size_t total = 0;
};

struct Health {
  bool ok = true;
  std::int64_t uptime_s = 0;
  std::uint64_t journal_seq = 0;
};

/// The whole bank behind one lock: modules, journal and snapshots.
///
/// Every authenticated method takes the caller's session token and refreshes
/// its activity. Mutations run one at a time; each commits exactly one
/// journal record before it touches memory.
class Bank {
 public:
  explicit Bank(BankOptions options);
  ~Bank();

  Bank(const Bank&) = delete;
  Bank& operator=(const Bank&) = delete;

  Timestamp now() const { return clock_->now(); }
  const BankOptions& options() const { return options_; }
  Clock& clock() { return *clock_; }

  // session and utility
  LoginResult login(std::string_view username, std::string_view password);
  SessionMeta heartbeat(std::string_view token);
  SessionMeta acknowledge_continue(std::string_view token);
  std::string logout(std::string_view token);
  void change_password(std::string_view token, std::string_view ic_passport_no,
                       std::string_view new_password);
  Customer update_profile(std::string_view token, const std::map<std::string, std::string>& fields);
  void cancel_atm(std::string_view token);
  Customer profile(std::string_view token);
  /// Remaining time for a live token, without refreshing it.
  std::optional<SessionMeta> session_meta(std::string_view token);

  // accounts
  std::vector<AccountView> accounts(std::string_view token);
  std::vector<HistoryItem> history(std::string_view token, AccountId account, Date from, Date to);
  StatementResult request_statement(std::string_view token, AccountId account,
                                    StatementChannel channel);

  // transfers
  std::string issue_tac(std::string_view token);
  Beneficiary save_beneficiary(std::string_view token, std::string_view account_no,
                               std::string_view nickname);
  Beneficiary update_beneficiary(std::string_view token, BeneficiaryId id,
                                 std::optional<std::string> account_no,
                                 std::optional<std::string> nickname);
  void delete_beneficiary(std::string_view token, BeneficiaryId id);
  std::vector<Beneficiary> list_beneficiaries(std::string_view token);
  TransferInstruction create_transfer(std::string_view token, TransferRequest req);
  std::vector<TransferInstruction> pending_transfers(std::string_view token);
  void cancel_pending_transfer(std::string_view token, InstructionId id);
  std::vector<TransferInstruction> transfer_history(std::string_view token, Date from, Date to);

  // bills
  BillerRegistration register_biller(std::string_view token, std::string_view corporation,
                                     std::string_view bill_account_no,
                                     std::string_view holder_name);
  void deregister_billers(std::string_view token, const std::vector<RegistrationId>& ids);
  std::vector<BillerRegistration> registrations(std::string_view token);
  BillPayment pay_registered(std::string_view token, RegistrationId registration, BillRequest req);
  BillPayment open_payment(std::string_view token, std::string_view corporation,
                           std::string_view bill_account_no, std::string_view holder_name,
                           BillRequest req);
  std::vector<BillPayment> enquire_future_payments(std::string_view token);
  void cancel_future_payment(std::string_view token, InstructionId id);
  std::vector<BillPayment> bill_payment_history(std::string_view token, Date from, Date to);
  std::vector<std::string> top_ten_payees();

  // cheques
  Cheque cheque_status(std::string_view token, AccountId account, std::string_view cheque_no);
  Cheque stop_cheque(std::string_view token, AccountId account, std::string_view cheque_no);
  ChequeBookRequest request_cheque_book(std::string_view token, AccountId account,
                                        std::uint32_t leaves);

  // administrator
  NewCustomer admin_add_customer(std::string_view token, const CustomerDraft& draft,
                                 std::string_view username, std::string_view initial_password,
                                 const std::vector<AccountSpec>& accounts);
  void admin_cancel_customer(std::string_view token, CustomerId customer);
  void admin_reinitialize(std::string_view token, std::string_view username);
  Cheque admin_present_cheque(std::string_view token, AccountId account,
                              std::string_view cheque_no, Money amount);
  ChequeBookRequest admin_dispatch_cheque_book(std::string_view token, RequestId request);
  ExecutionReport admin_run_value_date(std::string_view token, Date business_date);
  EntryPage admin_transactions(std::string_view token, std::size_t offset, std::size_t limit);

  // operator side (CLI, scheduler, fixtures)
  NewCustomer seed_customer(const CustomerDraft& draft, std::string_view username,
                            std::string_view password, bool must_change,
                            const std::vector<AccountSpec>& accounts);
  ExecutionReport run_value_date(Date business_date);
  ChequeBookRequest dispatch_cheque_book(RequestId request);
  std::size_t sweep_sessions();

  // persistence
  /// Throws NO_BASE for an incremental snapshot with nothing to build on.
  persist::SnapshotInfo snapshot(persist::SnapshotMode mode);
  persist::OffsiteReport offsite_copy(const std::filesystem::path& target);
  /// Drops journal records already covered by the latest snapshot.
  void compact_journal();
  const persist::RecoveryReport& recovery_report() const { return recovery_; }
  Health health() const;
  /// Canonical encoding of all durable state; equal bytes means equal state.
  std::string state_bytes() const;

  /// Simulated device size for the journal (fault injection).
  void set_journal_capacity(std::optional<std::uint64_t> bytes);
  std::vector<Notification> outbox() const;

  // direct module access for tests and tools; not synchronized
  const Ledger& ledger() const { return ledger_; }
  const Identity& identity() const { return identity_; }
  const Payments& payments() const { return payments_; }
  const Cheques& cheques() const { return cheques_; }

 private:
  Actor actor(std::string_view token);
  NewCustomer add_customer(CustomerAdded ev, const std::vector<AccountSpec>& accounts);
  void append(const Command& cmd);
  void recover();
  void load_state(std::string_view bytes);
  std::string encode_state() const;
  const Account& owned(const Actor& who, AccountId id) const;

  std::shared_ptr<Clock> clock_;
  BankOptions options_;
  Timestamp started_at_;

  EventBus bus_;
  Ledger ledger_;
  Identity identity_;
  Payments payments_;
  Cheques cheques_;

  mutable std::shared_mutex mu_;
  std::unique_ptr<persist::Journal> journal_;
  std::uint64_t seq_ = 0;
  // records since the last snapshot, the body of the next incremental one
  std::vector<persist::JournalRecord> since_snapshot_;
  std::optional<persist::SnapshotInfo> last_snapshot_;
  persist::RecoveryReport recovery_;

  mutable std::mutex outbox_mu_;
  std::deque<Notification> outbox_;
};

}  // namespace bank
