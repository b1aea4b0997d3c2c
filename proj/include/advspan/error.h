// Copyright 2026 The advspan Authors.
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

#ifndef ADVSPAN_ERROR_H_
#define ADVSPAN_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace advspan {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kProtocol = 3,
  kValidation = 4,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const { return ExitCode::kFailure; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kConfig; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kValidation; }
};

// Malformed input. `location` is a byte offset or a 1-based line number;
// see `unit()`.
class ParseError : public ValidationError {
 public:
  enum class Unit { kByte, kLine };

  ParseError(const std::string& what, std::size_t location, Unit unit);

  std::size_t location() const { return location_; }
  Unit unit() const { return unit_; }

 private:
  std::size_t location_;
  Unit unit_;
};

// An answer span would be touched by a rewrite.
class SpanProtectionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Records that must line up by id do not.
class JoinError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kProtocol; }
};

// The endpoint could not be reached after all retries.
class TransportError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class OutOfVocabularyError : public Error {
 public:
  explicit OutOfVocabularyError(const std::string& word)
      : Error("out-of-vocabulary word: " + word), word_(word) {}
  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

// A formula was applied to input on which it is not defined.
class UndefinedInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace advspan

#endif  // ADVSPAN_ERROR_H_
