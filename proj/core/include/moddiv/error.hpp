#pragma once

#include <stdexcept>
#include <string>

namespace moddiv {

// Every error raised by the library derives from Error. The CLI maps the
// concrete type onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or an unknown name.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A size limit (memory ceiling, 64-bit range, configured maximum) was hit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// An interval comparison could not be decided at the configured precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// A composite cofactor was left unsplit; carries the cofactor in decimal.
class IncompleteFactorization : public Error {
 public:
  IncompleteFactorization(const std::string& what, std::string cofactor)
      : Error(what), cofactor_(std::move(cofactor)) {}
  const std::string& cofactor() const { return cofactor_; }

 private:
  std::string cofactor_;
};

class FetchError : public Error {
 public:
  using Error::Error;
};

// Malformed b-file content; line() is 1-based, 0 when not line specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace moddiv
