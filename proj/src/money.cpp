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

#include "bank/money.hpp"

#include <cstdio>
#include <cstdlib>

namespace bank {

std::optional<Currency> Currency::parse(std::string_view text) {
  if (text.size() != 3) return std::nullopt;
  Currency c;
  for (std::size_t i = 0; i < 3; ++i) {
    if (text[i] < 'A' || text[i] > 'Z') return std::nullopt;
    c.code_[i] = text[i];
  }
  return c;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) fail(ErrorCode::INTERNAL, "money overflow");
  return out;
}

Money Money::operator-() const {
  if (amount_minor == INT64_MIN) fail(ErrorCode::INTERNAL, "money overflow");
  return {-amount_minor, currency};
}

Money& Money::operator+=(const Money& o) {
  if (currency != o.currency) fail(ErrorCode::CURRENCY_MISMATCH);
  amount_minor = checked_add(amount_minor, o.amount_minor);
  return *this;
}

Money& Money::operator-=(const Money& o) { return *this += -o; }

std::string Money::to_string() const {
  const std::int64_t whole = amount_minor / 100;
  const std::int64_t frac = std::llabs(amount_minor % 100);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld %s",
                (amount_minor < 0 && whole == 0) ? "-" : "", static_cast<long long>(whole),
                static_cast<long long>(frac), currency.str().c_str());
  return buf;
}

}  // namespace bank
