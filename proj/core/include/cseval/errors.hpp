#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cseval {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Syntactically broken input (bad JSON, missing/mistyped fields). Carries the
/// 1-based line number when the source is a record file.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// A contract or invariant violation: duplicate keys, bad configuration,
/// out-of-domain arguments.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A record could not be scored. Carries the offending token index.
class ScoringError : public Error {
public:
  ScoringError(std::size_t token_index, const std::string& what)
      : Error(what), token_index_(token_index) {}
  std::size_t token_index() const { return token_index_; }

private:
  std::size_t token_index_;
};

/// Transport-level failure, exhausted retries, or an attempt to use the
/// network while it is disabled.
class NetworkError : public Error {
public:
  using Error::Error;
};

}  // namespace cseval
