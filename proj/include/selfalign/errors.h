// Copyright 2026 The selfalign Authors.
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

#ifndef SELFALIGN_ERRORS_H_
#define SELFALIGN_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace selfalign {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or reward specification; raised before any work.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A spec or proposal failed validation. Carries one message per violation.
class ValidationError : public ConfigError {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Reward evaluation failed (missing feature, out-of-domain parameter).
class RewardError : public Error {
 public:
  using Error::Error;
};

// A reply from a ranking or reflection oracle could not be parsed.
class ReplyParseError : public Error {
 public:
  ReplyParseError(const std::string& what, std::string raw_reply)
      : Error(what), raw_reply_(std::move(raw_reply)) {}
  const std::string& raw_reply() const { return raw_reply_; }

 private:
  std::string raw_reply_;
};

// Transport or protocol failure talking to an oracle backend.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace selfalign

#endif  // SELFALIGN_ERRORS_H_
