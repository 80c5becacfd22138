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

#include "bank/bank.hpp"

#include <spdlog/spdlog.h>

#include "bank/codec.hpp"
#include "bank/error.hpp"

namespace bank {

namespace fs = std::filesystem;
using persist::SnapshotMode;

namespace {

constexpr std::size_t kOutboxLimit = 1000;
constexpr std::string_view kStateMagic = "IBSTATE1";

using Shared = std::shared_lock<std::shared_mutex>;
using Exclusive = std::unique_lock<std::shared_mutex>;

}  // namespace

Bank::Bank(BankOptions options)
    : clock_(options.clock ? options.clock : std::make_shared<SystemClock>()),
      options_(std::move(options)),
      started_at_(clock_->now()),
      ledger_(bus_),
      identity_(bus_, options_.identity),
      payments_(bus_, ledger_, options_.payments),
      cheques_(bus_, ledger_) {
  bus_.set_pre_commit([this](const Command& cmd) { append(cmd); });
  payments_.set_notification_sink([this](const Notification& n) {
    spdlog::info("notification for instruction {} queued to {}", n.instruction.value, n.email);
    std::lock_guard lock(outbox_mu_);
    outbox_.push_back(n);
    if (outbox_.size() > kOutboxLimit) outbox_.pop_front();
  });
  if (options_.data_dir) recover();
  if (options_.admin && !options_.read_only)
    identity_.ensure_admin(options_.admin->username, options_.admin->password, now());
}

Bank::~Bank() = default;

// ------------------------------------------------------------ persistence

void Bank::append(const Command& cmd) {
  if (options_.read_only) fail(ErrorCode::STORAGE_FAILURE, "bank opened read-only");
  const std::string payload = encode_command(cmd);
  const Timestamp at = now();
  std::uint64_t seq = seq_ + 1;
  if (journal_) seq = journal_->append(payload, at);
  seq_ = seq;
  if (options_.data_dir) since_snapshot_.push_back({seq, at, payload});
}

void Bank::recover() {
  const fs::path dir = *options_.data_dir;
  if (!options_.read_only) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::STORAGE_FAILURE, "cannot create " + dir.string());
  }
  persist::RecoveryPlan plan = persist::plan_recovery(dir);

  // Decode everything before touching state so a bad record leaves nothing half-loaded.
  std::vector<Command> commands;
  commands.reserve(plan.records.size());
  for (const auto& r : plan.records) {
    try {
      commands.push_back(decode_command(r.payload));
    } catch (const std::exception& e) {
      fail(ErrorCode::CORRUPT_JOURNAL,
           "record " + std::to_string(r.seq) + " does not decode: " + e.what());
    }
  }
  if (plan.base_state) {
    try {
      load_state(*plan.base_state);
    } catch (const DecodeError& e) {
      fail(ErrorCode::CORRUPT_SNAPSHOT, std::string("snapshot state does not decode: ") + e.what());
    }
  }
  for (const auto& cmd : commands) bus_.replay(cmd);

  seq_ = plan.report.last_seq;
  if (!plan.chain.empty()) {
    last_snapshot_ = plan.chain.back();
    for (auto& r : plan.records)
      if (r.seq > last_snapshot_->upto_seq) since_snapshot_.push_back(std::move(r));
  }
  recovery_ = std::move(plan.report);
  for (const auto& w : recovery_.warnings) spdlog::warn("recovery: {}", w);
  spdlog::info("recovered {} records up to seq {}", recovery_.events, recovery_.last_seq);

  if (!options_.read_only)
    journal_ = std::make_unique<persist::Journal>(dir / persist::kJournalFile, seq_ + 1,
                                                  recovery_.valid_journal_bytes, options_.journal);
}

std::string Bank::state_bytes() const {
  Shared lock(mu_);
  return encode_state();
}

std::string Bank::encode_state() const {
  Encoder e;
  e.raw(kStateMagic);
  ledger_.encode_state(e);
  identity_.encode_state(e);
  payments_.encode_state(e);
  cheques_.encode_state(e);
  return e.take();
}

void Bank::load_state(std::string_view bytes) {
  Decoder d(bytes);
  std::string magic(kStateMagic.size(), '\0');
  for (auto& c : magic) c = static_cast<char>(d.u8());
  if (magic != kStateMagic) throw DecodeError("bad state magic");
  ledger_.decode_state(d);
  identity_.decode_state(d);
  payments_.decode_state(d);
  cheques_.decode_state(d);
  d.expect_done();
}

persist::SnapshotInfo Bank::snapshot(SnapshotMode mode) {
  if (!options_.data_dir) fail(ErrorCode::STORAGE_FAILURE, "no data directory configured");
  if (options_.read_only) fail(ErrorCode::STORAGE_FAILURE, "bank opened read-only");
  Exclusive lock(mu_);
  std::optional<std::uint64_t> base;
  std::string payload;
  if (mode == SnapshotMode::incremental) {
    if (!last_snapshot_) fail(ErrorCode::NO_BASE);
    base = last_snapshot_->id;
    payload = persist::encode_record_batch(since_snapshot_);
  } else {
    payload = encode_state();
  }
  persist::SnapshotStore store(*options_.data_dir / persist::kSnapshotDir);
  last_snapshot_ = store.write(mode, base, seq_, now(), payload);
  since_snapshot_.clear();
  return *last_snapshot_;
}

void Bank::compact_journal() {
  Exclusive lock(mu_);
  if (!journal_ || !last_snapshot_) return;
  journal_->truncate_prefix(last_snapshot_->upto_seq);
}

persist::OffsiteReport Bank::offsite_copy(const fs::path& target) {
  if (!options_.data_dir) fail(ErrorCode::STORAGE_FAILURE, "no data directory configured");
  Exclusive lock(mu_);
  return persist::offsite_copy(*options_.data_dir, target);
}

Health Bank::health() const {
  Shared lock(mu_);
  Health h;
  h.ok = !journal_ || journal_->healthy();
  h.uptime_s = (now().millis - started_at_.millis) / 1000;
  h.journal_seq = seq_;
  return h;
}

void Bank::set_journal_capacity(std::optional<std::uint64_t> bytes) {
  Exclusive lock(mu_);
  if (journal_) journal_->set_capacity(bytes);
}

std::vector<Notification> Bank::outbox() const {
  std::lock_guard lock(outbox_mu_);
  return {outbox_.begin(), outbox_.end()};
}

// ------------------------------------------------------------ helpers

Actor Bank::actor(std::string_view token) {
  const Session s = identity_.authorize(token, now());
  if (s.must_change) fail(ErrorCode::PASSWORD_CHANGE_REQUIRED);
  return Actor{s.customer, std::string(token), now()};
}

const Account& Bank::owned(const Actor& who, AccountId id) const {
  const Account& a = ledger_.account(id);
  if (a.owner != who.customer) fail(ErrorCode::NOT_OWNER);
  return a;
}

NewCustomer Bank::add_customer(CustomerAdded ev, const std::vector<AccountSpec>& specs) {
  NewCustomer out{ev.customer.id, {}};
  const Timestamp at = now();
  auto batch = ledger_.batch();
  Command cmd;
  cmd.emplace_back(std::move(ev));
  for (const auto& spec : specs) {
    if (spec.opening_balance.amount_minor < 0)
      fail(ErrorCode::INVALID_FIELD, "negative opening balance");
    AccountOpened opened = batch.open_account(out.customer, spec.kind, spec.credit_limit, at);
    const AccountId id = opened.account.id;
    const Currency currency = opened.account.currency;
    out.accounts.push_back(id);
    cmd.emplace_back(std::move(opened));
    const std::int64_t amount = spec.opening_balance.amount_minor;
    if (amount == 0) continue;
    if (spec.opening_balance.currency != currency) fail(ErrorCode::CURRENCY_MISMATCH);
    const bool card = spec.kind == AccountKind::credit_card;
    EntryDraft draft;
    draft.kind = card ? EntryKind::adjustment : EntryKind::deposit;
    draft.description = card ? "Opening card balance" : "Opening deposit";
    draft.legs = {{kClearingAccount, Money{card ? amount : -amount, currency}},
                  {id, Money{card ? -amount : amount, currency}}};
    cmd.emplace_back(batch.post(draft, at));
  }
  bus_.commit(cmd);
  return out;
}

// ------------------------------------------------------------ session

LoginResult Bank::login(std::string_view username, std::string_view password) {
  Exclusive lock(mu_);
  return identity_.login(username, password, now());
}

SessionMeta Bank::heartbeat(std::string_view token) {
  Shared lock(mu_);
  return identity_.heartbeat(token, now());
}

SessionMeta Bank::acknowledge_continue(std::string_view token) {
  Shared lock(mu_);
  identity_.acknowledge_continue(token, now());
  return identity_.meta(identity_.require(token, now()), now());
}

std::string Bank::logout(std::string_view token) {
  Exclusive lock(mu_);
  std::string msg = identity_.logout(token, now());
  payments_.discard_tacs(token);
  return msg;
}

void Bank::change_password(std::string_view token, std::string_view ic_passport_no,
                           std::string_view new_password) {
  Exclusive lock(mu_);
  identity_.change_password(token, ic_passport_no, new_password, now());
}

Customer Bank::update_profile(std::string_view token,
                              const std::map<std::string, std::string>& fields) {
  Exclusive lock(mu_);
  return identity_.update_profile(token, fields, now());
}

void Bank::cancel_atm(std::string_view token) {
  Exclusive lock(mu_);
  identity_.cancel_atm(token, now());
}

Customer Bank::profile(std::string_view token) {
  Shared lock(mu_);
  const Session s = identity_.authorize(token, now());
  return *identity_.find_customer(s.customer);
}

std::optional<SessionMeta> Bank::session_meta(std::string_view token) {
  Shared lock(mu_);
  try {
    return identity_.meta(identity_.require(token, now()), now());
  } catch (const Error&) {
    return std::nullopt;
  }
}

// ------------------------------------------------------------ accounts

std::vector<AccountView> Bank::accounts(std::string_view token) {
  Shared lock(mu_);
  const Actor who = actor(token);
  std::vector<AccountView> out;
  for (const auto& a : ledger_.accounts_of(who.customer)) out.push_back({a, ledger_.balance(a.id)});
  return out;
}

std::vector<HistoryItem> Bank::history(std::string_view token, AccountId account, Date from,
                                       Date to) {
  Shared lock(mu_);
  const Actor who = actor(token);
  owned(who, account);
  return ledger_.history(account, from, to, who.now);
}

StatementResult Bank::request_statement(std::string_view token, AccountId account,
                                        StatementChannel channel) {
  Exclusive lock(mu_);
  const Actor who = actor(token);
  owned(who, account);
  return ledger_.request_statement(account, channel, who.now);
}

// ------------------------------------------------------------ transfers

std::string Bank::issue_tac(std::string_view token) {
  Shared lock(mu_);
  const Actor who = actor(token);
  return payments_.issue_tac(token, who.now);
}

Beneficiary Bank::save_beneficiary(std::string_view token, std::string_view account_no,
                                   std::string_view nickname) {
  Exclusive lock(mu_);
  return payments_.save_beneficiary(actor(token), account_no, nickname);
}

Beneficiary Bank::update_beneficiary(std::string_view token, BeneficiaryId id,
                                     std::optional<std::string> account_no,
                                     std::optional<std::string> nickname) {
  Exclusive lock(mu_);
  return payments_.update_beneficiary(actor(token), id, std::move(account_no), std::move(nickname));
}

void Bank::delete_beneficiary(std::string_view token, BeneficiaryId id) {
  Exclusive lock(mu_);
  payments_.delete_beneficiary(actor(token), id);
}

std::vector<Beneficiary> Bank::list_beneficiaries(std::string_view token) {
  Shared lock(mu_);
  return payments_.list_beneficiaries(actor(token).customer);
}

TransferInstruction Bank::create_transfer(std::string_view token, TransferRequest req) {
  Exclusive lock(mu_);
  return payments_.create_transfer(actor(token), std::move(req));
}

std::vector<TransferInstruction> Bank::pending_transfers(std::string_view token) {
  Shared lock(mu_);
  return payments_.pending_transfers(actor(token).customer);
}

void Bank::cancel_pending_transfer(std::string_view token, InstructionId id) {
  Exclusive lock(mu_);
  payments_.cancel_pending_transfer(actor(token), id);
}

std::vector<TransferInstruction> Bank::transfer_history(std::string_view token, Date from,
                                                        Date to) {
  Shared lock(mu_);
  const Actor who = actor(token);
  return payments_.transfer_history(who.customer, from, to, who.now);
}

// ------------------------------------------------------------ bills

BillerRegistration Bank::register_biller(std::string_view token, std::string_view corporation,
                                         std::string_view bill_account_no,
                                         std::string_view holder_name) {
  Exclusive lock(mu_);
  return payments_.register_biller(actor(token), corporation, bill_account_no, holder_name);
}

void Bank::deregister_billers(std::string_view token, const std::vector<RegistrationId>& ids) {
  Exclusive lock(mu_);
  payments_.deregister_billers(actor(token), ids);
}

std::vector<BillerRegistration> Bank::registrations(std::string_view token) {
  Shared lock(mu_);
  return payments_.registrations(actor(token).customer);
}

BillPayment Bank::pay_registered(std::string_view token, RegistrationId registration,
                                 BillRequest req) {
  Exclusive lock(mu_);
  return payments_.pay_registered(actor(token), registration, std::move(req));
}

BillPayment Bank::open_payment(std::string_view token, std::string_view corporation,
                               std::string_view bill_account_no, std::string_view holder_name,
                               BillRequest req) {
  Exclusive lock(mu_);
  return payments_.open_payment(actor(token), corporation, bill_account_no, holder_name,
                                std::move(req));
}

std::vector<BillPayment> Bank::enquire_future_payments(std::string_view token) {
  Shared lock(mu_);
  return payments_.enquire_future_payments(actor(token).customer);
}

void Bank::cancel_future_payment(std::string_view token, InstructionId id) {
  Exclusive lock(mu_);
  payments_.cancel_future_payment(actor(token), id);
}

std::vector<BillPayment> Bank::bill_payment_history(std::string_view token, Date from, Date to) {
  Shared lock(mu_);
  const Actor who = actor(token);
  return payments_.bill_payment_history(who.customer, from, to, who.now);
}

std::vector<std::string> Bank::top_ten_payees() {
  Shared lock(mu_);
  return payments_.top_ten_payees();
}

// ------------------------------------------------------------ cheques

Cheque Bank::cheque_status(std::string_view token, AccountId account, std::string_view cheque_no) {
  Shared lock(mu_);
  return cheques_.cheque_status(actor(token), account, cheque_no);
}

Cheque Bank::stop_cheque(std::string_view token, AccountId account, std::string_view cheque_no) {
  Exclusive lock(mu_);
  return cheques_.stop_cheque(actor(token), account, cheque_no);
}

ChequeBookRequest Bank::request_cheque_book(std::string_view token, AccountId account,
                                            std::uint32_t leaves) {
  Exclusive lock(mu_);
  return cheques_.request_cheque_book(actor(token), account, leaves);
}

// ------------------------------------------------------------ administrator

NewCustomer Bank::admin_add_customer(std::string_view token, const CustomerDraft& draft,
                                     std::string_view username,
                                     std::string_view initial_password,
                                     const std::vector<AccountSpec>& accounts) {
  Exclusive lock(mu_);
  identity_.require_admin(token, now());
  return add_customer(
      identity_.prepare_customer(draft, username, initial_password, true, false, now()), accounts);
}

void Bank::admin_cancel_customer(std::string_view token, CustomerId customer) {
  Exclusive lock(mu_);
  identity_.admin_cancel_customer(token, customer, now());
}

void Bank::admin_reinitialize(std::string_view token, std::string_view username) {
  Exclusive lock(mu_);
  identity_.admin_reinitialize(token, username, now());
}

Cheque Bank::admin_present_cheque(std::string_view token, AccountId account,
                                  std::string_view cheque_no, Money amount) {
  Exclusive lock(mu_);
  identity_.require_admin(token, now());
  return cheques_.present_cheque(account, cheque_no, amount, now());
}

ChequeBookRequest Bank::admin_dispatch_cheque_book(std::string_view token, RequestId request) {
  Exclusive lock(mu_);
  identity_.require_admin(token, now());
  return cheques_.dispatch_cheque_book(request, now());
}

ExecutionReport Bank::admin_run_value_date(std::string_view token, Date business_date) {
  Exclusive lock(mu_);
  identity_.require_admin(token, now());
  return payments_.run_value_date(business_date, now());
}

EntryPage Bank::admin_transactions(std::string_view token, std::size_t offset, std::size_t limit) {
  Shared lock(mu_);
  identity_.require_admin(token, now());
  const auto entries = ledger_.entries();
  EntryPage page;
  page.total = entries.size();
  // newest first
  for (std::size_t i = offset; i < entries.size() && page.items.size() < limit; ++i)
    page.items.push_back(entries[entries.size() - 1 - i]);
  return page;
}

// ------------------------------------------------------------ operator

NewCustomer Bank::seed_customer(const CustomerDraft& draft, std::string_view username,
                                std::string_view password, bool must_change,
                                const std::vector<AccountSpec>& accounts) {
  Exclusive lock(mu_);
  return add_customer(identity_.prepare_customer(draft, username, password, must_change, false, now()),
                      accounts);
}

ExecutionReport Bank::run_value_date(Date business_date) {
  Exclusive lock(mu_);
  return payments_.run_value_date(business_date, now());
}

ChequeBookRequest Bank::dispatch_cheque_book(RequestId request) {
  Exclusive lock(mu_);
  return cheques_.dispatch_cheque_book(request, now());
}

std::size_t Bank::sweep_sessions() {
  Shared lock(mu_);
  return identity_.sweep(now());
}

}  // namespace bank
