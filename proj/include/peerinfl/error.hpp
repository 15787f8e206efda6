#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace peerinfl {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input row. `line()` is 1-based and counts the header, if any.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class EmptyInputError : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

// No non-activated node remains, so the mean-field threshold is undefined.
class DegenerateStateError : public Error {
public:
  using Error::Error;
};

class UndefinedFractionError : public Error {
public:
  using Error::Error;
};

}  // namespace peerinfl
