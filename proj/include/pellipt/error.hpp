// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pellipt {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text or binary payload. `offset` is a byte offset into the
/// input, `line` is 1-based (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::size_t line)
      : Error(what), offset_(offset), line_(line) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t offset_;
  std::size_t line_;
};

/// A coefficient field (or a single matrix) is not strictly accretive.
class DegenerateError : public Error {
 public:
  DegenerateError(const std::string& what, std::size_t cell)
      : Error(what), cell_(cell) {}

  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

/// A dense or sparse solver failed; the message carries the offending input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iteration ran out of budget before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace pellipt
