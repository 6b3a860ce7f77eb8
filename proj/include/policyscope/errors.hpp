// Copyright 2026 The PolicyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace policyscope {

// Base class for every error raised by the library. Each subclass names a
// failure category so callers (and the CLI) can react without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (bad bounds,
// out-of-range point, unsupported dimension).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation invoked in a state that does not support it (empty history,
// unfitted model).
class StateError : public Error {
 public:
  using Error::Error;
};

// Malformed identifiers or structurally invalid values (unknown criterion,
// invalid weight vector, unknown schedule).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Structured parse failure for LLM output. The message is written to be
// sent back to the model verbatim in a corrective re-ask.
class ParseError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FileError : public Error {
 public:
  using Error::Error;
};

class ReplayError : public Error {
 public:
  using Error::Error;
};

// Canned response script ran out.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

// Transport failure talking to a chat-completions endpoint. `status` is the
// last HTTP status seen, or 0 when no response was received at all.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status, int retries)
      : Error(what), status_(status), retries_(retries) {}

  int status() const noexcept { return status_; }
  int retries() const noexcept { return retries_; }

 private:
  int status_;
  int retries_;
};

// 401/403: credentials rejected. Never retried.
class AuthError : public TransportError {
 public:
  using TransportError::TransportError;
};

// Endpoint answered, but the body is not a chat-completions response.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace policyscope
