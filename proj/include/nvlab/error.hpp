// Copyright 2026 The nvlab Authors
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

namespace nvlab {

// Process exit codes used by the CLI. Each error class below maps to one.
enum class ExitCode : int {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kTransport = 3,
  kParseAmbiguity = 4,
  kIntegrity = 5,
  kValidation = 6,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const { return ExitCode::kOther; }
};

class InvalidScenarioError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kConfig; }
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("config error in '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }
  ExitCode exit_code() const override { return ExitCode::kConfig; }

 private:
  std::string field_;
};

// A template references a placeholder that was not supplied.
class TemplateError : public Error {
 public:
  TemplateError(std::string variable, const std::string& what)
      : Error(what), variable_(std::move(variable)) {}
  const std::string& variable() const { return variable_; }
  ExitCode exit_code() const override { return ExitCode::kValidation; }

 private:
  std::string variable_;
};

class AssetError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kValidation; }
};

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0) : Error(what), status_(status) {}
  int status() const { return status_; }
  ExitCode exit_code() const override { return ExitCode::kTransport; }

 private:
  int status_;
};

// 401/403 and other non-retryable request failures.
class AuthError : public TransportError {
 public:
  using TransportError::TransportError;
};

class AmbiguousDecisionError : public Error {
 public:
  explicit AmbiguousDecisionError(const std::string& what, std::string raw_response = {})
      : Error(what), raw_response_(std::move(raw_response)) {}
  // Last reply that could not be parsed, kept for offline re-extraction.
  const std::string& raw_response() const { return raw_response_; }
  ExitCode exit_code() const override { return ExitCode::kParseAmbiguity; }

 private:
  std::string raw_response_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kIntegrity; }
};

}  // namespace nvlab
