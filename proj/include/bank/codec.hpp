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

#include <algorithm>
#include <cstdint>
#include <type_traits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bank/domain.hpp"

namespace bank {

/// Thrown by Decoder on truncated or malformed input.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Little-endian, fixed-width, length-prefixed. Field order is the format.
class Encoder {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(std::string_view s);
  void raw(std::string_view s) { buf_.append(s); }

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Decoder {
 public:
  explicit Decoder(std::string_view in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  bool boolean();
  std::string str();

  bool done() const { return pos_ == in_.size(); }
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  std::string_view in_;
  std::size_t pos_ = 0;
};

// Domain value codecs. Each put/get pair is the canonical layout of its type.
void put(Encoder& e, const Money& v);
void get(Decoder& d, Money& v);
void put(Encoder& e, Timestamp v);
void get(Decoder& d, Timestamp& v);
void put(Encoder& e, Date v);
void get(Decoder& d, Date& v);
void put(Encoder& e, const std::string& v);
void get(Decoder& d, std::string& v);
void put(Encoder& e, bool v);
void get(Decoder& d, bool& v);
void put(Encoder& e, std::uint32_t v);
void get(Decoder& d, std::uint32_t& v);

template <class Tag>
void put(Encoder& e, Id<Tag> v) { e.u64(v.value); }
template <class Tag>
void get(Decoder& d, Id<Tag>& v) { v.value = d.u64(); }

template <class E>
  requires std::is_enum_v<E>
void put(Encoder& e, E v) { e.u8(static_cast<std::uint8_t>(v)); }
template <class E>
  requires std::is_enum_v<E>
void get(Decoder& d, E& v) { v = static_cast<E>(d.u8()); }

template <class T>
void put(Encoder& e, const std::optional<T>& v) {
  e.boolean(v.has_value());
  if (v) put(e, *v);
}
template <class T>
void get(Decoder& d, std::optional<T>& v) {
  if (d.boolean()) {
    T t{};
    get(d, t);
    v = std::move(t);
  } else {
    v.reset();
  }
}

template <class T>
void put(Encoder& e, const std::vector<T>& v) {
  e.u32(static_cast<std::uint32_t>(v.size()));
  for (const auto& x : v) put(e, x);
}
template <class T>
void get(Decoder& d, std::vector<T>& v) {
  const std::uint32_t n = d.u32();
  v.clear();
  v.reserve(std::min<std::uint32_t>(n, 4096));
  for (std::uint32_t i = 0; i < n; ++i) {
    T t{};
    get(d, t);
    v.push_back(std::move(t));
  }
}

void put(Encoder& e, const Account& v);
void get(Decoder& d, Account& v);
void put(Encoder& e, const Posting& v);
void get(Decoder& d, Posting& v);
void put(Encoder& e, const LedgerEntry& v);
void get(Decoder& d, LedgerEntry& v);
void put(Encoder& e, const StatementRequest& v);
void get(Decoder& d, StatementRequest& v);
void put(Encoder& e, const Customer& v);
void get(Decoder& d, Customer& v);
void put(Encoder& e, const Credential& v);
void get(Decoder& d, Credential& v);
void put(Encoder& e, const Beneficiary& v);
void get(Decoder& d, Beneficiary& v);
void put(Encoder& e, const TransferTarget& v);
void get(Decoder& d, TransferTarget& v);
void put(Encoder& e, const TransferInstruction& v);
void get(Decoder& d, TransferInstruction& v);
void put(Encoder& e, const BillerRegistration& v);
void get(Decoder& d, BillerRegistration& v);
void put(Encoder& e, const BillPayment& v);
void get(Decoder& d, BillPayment& v);
void put(Encoder& e, const Cheque& v);
void get(Decoder& d, Cheque& v);
void put(Encoder& e, const ChequeBookRequest& v);
void get(Decoder& d, ChequeBookRequest& v);

/// CRC-32 (IEEE 802.3 polynomial, as used by zlib/PNG/gzip).
std::uint32_t crc32(std::string_view data, std::uint32_t seed = 0);

}  // namespace bank
