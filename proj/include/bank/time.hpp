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

#include <atomic>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bank {

/// Wall-clock instant in unix milliseconds (UTC).
struct Timestamp {
  std::int64_t millis = 0;

  static constexpr Timestamp from_seconds(std::int64_t s) { return {s * 1000}; }
  constexpr std::int64_t seconds() const { return millis / 1000; }

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

constexpr std::int64_t kMillisPerDay = 86'400'000;

/// Civil calendar date, stored as days since 1970-01-01 (UTC).
struct Date {
  std::int32_t days = 0;

  static Date from_ymd(int year, unsigned month, unsigned day);
  static Date of(Timestamp t);
  /// Parses strict "YYYY-MM-DD"; nullopt on anything else.
  static std::optional<Date> parse(std::string_view text);

  Timestamp start() const { return {std::int64_t{days} * kMillisPerDay}; }
  std::string to_string() const;

  constexpr Date operator+(std::int32_t n) const { return {days + n}; }
  constexpr Date operator-(std::int32_t n) const { return {days - n}; }

  friend constexpr auto operator<=>(Date, Date) = default;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
};

/// Virtual clock for tests, the CLI, and offline processing.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = {}) : now_(start.millis) {}

  Timestamp now() const override { return {now_.load()}; }
  void set(Timestamp t) { now_.store(t.millis); }
  void advance_seconds(std::int64_t s) { now_.fetch_add(s * 1000); }
  void advance_days(std::int32_t d) { now_.fetch_add(std::int64_t{d} * kMillisPerDay); }

 private:
  std::atomic<std::int64_t> now_;
};

}  // namespace bank
