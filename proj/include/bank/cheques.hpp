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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bank/domain.hpp"
#include "bank/events.hpp"
#include "bank/ledger.hpp"
#include "bank/payments.hpp"

namespace bank {

class Encoder;
class Decoder;

/// Cheque status enquiry, stop-payment and cheque-book requests.
///
/// Cheques exist once their book is dispatched; presentment is an
/// operator-side action standing in for the clearing house.
class Cheques {
 public:
  static constexpr std::uint32_t kAllowedLeaves[] = {25, 50};

  Cheques(EventBus& bus, Ledger& ledger);

  Cheques(const Cheques&) = delete;
  Cheques& operator=(const Cheques&) = delete;

  Cheque cheque_status(const Actor& who, AccountId account, std::string_view cheque_no) const;
  Cheque stop_cheque(const Actor& who, AccountId account, std::string_view cheque_no);
  ChequeBookRequest request_cheque_book(const Actor& who, AccountId account, std::uint32_t leaves);

  ChequeBookRequest dispatch_cheque_book(RequestId request, Timestamp now);
  /// Funds available: paid with a ledger debit. Short: returned. Stopped: rejected.
  Cheque present_cheque(AccountId account, std::string_view cheque_no, Money amount,
                        Timestamp now);

  const std::map<RequestId, ChequeBookRequest>& book_requests() const { return requests_; }
  std::vector<Cheque> cheques_of(AccountId account) const;

  void apply(const Event& ev);
  void encode_state(Encoder& e) const;
  void decode_state(Decoder& d);

 private:
  using Key = std::pair<AccountId, std::string>;

  const Cheque& find(AccountId account, std::string_view cheque_no) const;
  void check_owner(const Actor& who, AccountId account) const;

  EventBus& bus_;
  Ledger& ledger_;
  std::map<Key, Cheque> cheques_;
  std::map<RequestId, ChequeBookRequest> requests_;
  std::map<AccountId, std::uint64_t> next_serial_;
  std::uint64_t next_request_ = 1;
};

std::string format_cheque_no(std::uint64_t serial);

}  // namespace bank
