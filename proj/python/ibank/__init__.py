# Copyright 2026 The ibank Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the ibank core."""

import json

from ._bank import Bank, BankError

__all__ = ["Bank", "BankError", "call"]

# BankError(code, message)
BankError.code = property(lambda self: self.args[0])
BankError.message = property(lambda self: self.args[1])


def call(bank, method, path, token="", body=None, query=None):
    """Routes one JSON request; returns (status, decoded body, headers)."""
    raw = "" if body is None else json.dumps(body)
    status, text, headers = bank.request(method, path, token, raw, query or {})
    return status, json.loads(text), headers
