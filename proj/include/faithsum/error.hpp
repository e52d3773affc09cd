// Copyright 2026 The faithsum Authors
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

#include <stdexcept>
#include <string>

namespace faithsum {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: unreadable file, malformed row, missing field.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A remote service answered, but the answer breaks the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A remote service failed the request (HTTP error status).
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string body_excerpt, const std::string& what)
      : Error(what), status_(status), body_(std::move(body_excerpt)) {}

  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

// A remote service could not be reached at all (connection-level failure).
class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Every candidate for a record failed to generate.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace faithsum
