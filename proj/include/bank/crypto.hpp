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
#include <string>
#include <string_view>

namespace bank::crypto {

/// Cryptographically secure random bytes.
std::string random_bytes(std::size_t n);

/// 256-bit random token rendered as 64 lowercase hex characters.
std::string random_token();

/// Uniform integer in [0, bound) from the secure generator.
std::uint32_t random_below(std::uint32_t bound);

/// PBKDF2-HMAC-SHA256, 32-byte output.
std::string derive_password_digest(std::string_view password, std::string_view salt,
                                   std::uint32_t iterations);

/// Constant-time equality.
bool equal(std::string_view a, std::string_view b);

std::string to_hex(std::string_view bytes);

}  // namespace bank::crypto
