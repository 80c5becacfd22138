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

#include "bank/error.hpp"

namespace bank {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
#define BANK_NAME_ENTRY(name, status) \
  case ErrorCode::name:               \
    return #name;
    BANK_ERROR_CODES(BANK_NAME_ENTRY)
#undef BANK_NAME_ENTRY
  }
  return "INTERNAL";
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
#define BANK_STATUS_ENTRY(name, status) \
  case ErrorCode::name:                 \
    return status;
    BANK_ERROR_CODES(BANK_STATUS_ENTRY)
#undef BANK_STATUS_ENTRY
  }
  return 500;
}

}  // namespace bank
