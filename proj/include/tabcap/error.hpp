#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace tabcap {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A DocBank annotation line that could not be decoded.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A coordinate or color component outside its permitted range.
class RangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Column detection is undefined for pages without paragraph tokens.
class IndeterminateError : public Error {
 public:
  using Error::Error;
};

/// A page that failed one of the dataset filtering criteria.
class RejectedPage : public Error {
 public:
  RejectedPage(std::string criterion)
      : Error("page rejected: " + criterion), criterion_(std::move(criterion)) {}
  const std::string& criterion() const noexcept { return criterion_; }

 private:
  std::string criterion_;
};

/// A metric evaluated on inputs for which it has no defined value.
class UndefinedScore : public Error {
 public:
  using Error::Error;
};

}  // namespace tabcap
