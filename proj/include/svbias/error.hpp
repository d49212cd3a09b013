/*
 * Copyright 2026 The svbias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SVBIAS_ERROR_HPP_
#define SVBIAS_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svbias {

// Broad failure class; the CLI maps each kind to its exit code.
enum class ErrorKind {
  kInput,       // malformed or inconsistent input files / arguments
  kEvaluation,  // inputs parse but cannot be evaluated (e.g. single-label set)
  kIo,          // filesystem failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message)
      : Error(ErrorKind::kInput, message) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& message)
      : Error(ErrorKind::kEvaluation, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::kIo, message) {}
};

// A parse failure pinned to a line of a source file.
class ParseError : public InputError {
 public:
  ParseError(std::string source, std::size_t line, std::string text,
             const std::string& reason)
      : InputError(source + ":" + std::to_string(line) + ": " + reason +
                   " [" + text + "]"),
        source_(std::move(source)),
        line_(line),
        text_(std::move(text)) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string text_;
};

}  // namespace svbias

#endif  // SVBIAS_ERROR_HPP_
