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

#include <string>

#include <json.hpp>

#include "bank/bank.hpp"

namespace bank::api {

using Json = nlohmann::json;

/// "2026-10-19T08:30:00.000Z"
std::string format_timestamp(Timestamp t);

template <class Tag>
std::string id_str(Id<Tag> id) {
  return std::to_string(id.value);
}

Json to_json(const Money& m);
Json to_json(const AccountView& a);
Json to_json(const HistoryItem& h);
Json to_json(const StatementResult& s);
Json to_json(const Customer& c);
Json to_json(const Beneficiary& b);
Json to_json(const TransferInstruction& t);
Json to_json(const BillerRegistration& r);
Json to_json(const BillPayment& p);
Json to_json(const Cheque& c);
Json to_json(const ChequeBookRequest& r);
Json to_json(const ExecutionReport& r);
Json to_json(const LedgerEntry& e);
Json to_json(const SessionMeta& m);

template <class T>
Json to_json(const std::vector<T>& items) {
  Json out = Json::array();
  for (const auto& i : items) out.push_back(to_json(i));
  return out;
}

}  // namespace bank::api
