// Copyright 2026-present the cqa-engine authors
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

namespace cqa {

// Base of every error the engine raises. Callers that only care about
// "something went wrong" catch this; the subclasses map onto HTTP statuses
// and CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateEmbedding : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

// Internal bookkeeping went inconsistent (e.g. a member without a cluster).
// Always a programming bug.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IncompatibleSnapshot : public Error {
 public:
  using Error::Error;
};

// A remote model endpoint failed: non-2xx after retries, timeout, or
// transport failure.
class UpstreamError : public Error {
 public:
  UpstreamError(const std::string& what, int status = 0, double elapsed_s = 0.0)
      : Error(what), status_(status), elapsed_s_(elapsed_s) {}

  int status() const { return status_; }
  double elapsed_seconds() const { return elapsed_s_; }

 private:
  int status_;
  double elapsed_s_;
};

// The endpoint answered but the payload did not have the expected shape.
class ProtocolError : public UpstreamError {
 public:
  explicit ProtocolError(const std::string& what) : UpstreamError(what) {}
};

}  // namespace cqa
