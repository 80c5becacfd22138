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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bank/error.hpp"

namespace bank {

/// ISO-4217 style three-letter code.
class Currency {
 public:
  constexpr Currency() : code_{'M', 'Y', 'R'} {}
  /// Uppercase A-Z only, exactly three letters.
  static std::optional<Currency> parse(std::string_view text);

  std::string_view code() const { return {code_.data(), code_.size()}; }
  std::string str() const { return std::string(code()); }

  friend constexpr bool operator==(const Currency&, const Currency&) = default;
  friend constexpr auto operator<=>(const Currency&, const Currency&) = default;

 private:
  std::array<char, 3> code_;
};

inline constexpr Currency kDefaultCurrency{};

/// Exact amount in minor units (sen for MYR). No fractional units exist.
struct Money {
  std::int64_t amount_minor = 0;
  Currency currency = kDefaultCurrency;

  static constexpr Money minor(std::int64_t v, Currency c = kDefaultCurrency) { return {v, c}; }

  bool is_zero() const { return amount_minor == 0; }
  bool positive() const { return amount_minor > 0; }

  Money operator-() const;
  Money& operator+=(const Money& o);
  Money& operator-=(const Money& o);
  friend Money operator+(Money a, const Money& b) { return a += b; }
  friend Money operator-(Money a, const Money& b) { return a -= b; }

  friend bool operator==(const Money&, const Money&) = default;

  /// "RM 123.45"-free rendering: "123.45 MYR".
  std::string to_string() const;
};

/// Checked signed addition; throws INTERNAL on overflow.
std::int64_t checked_add(std::int64_t a, std::int64_t b);

}  // namespace bank
