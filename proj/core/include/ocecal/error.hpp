#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ocecal {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied a value outside an operation's documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A ScoredExample (or a dataset built from them) violates its invariants.
class InvalidExample : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A cost evaluation left the representable range of double.
class NumericOverflow : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset input. `line()` is 1-based; 0 means "not tied to a line".
class DataError : public Error {
 public:
  DataError(std::size_t line, const std::string& detail, const std::string& source = {})
      : Error(compose(line, detail, source)), line_(line), detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string compose(std::size_t line, const std::string& detail,
                             const std::string& source) {
    std::string out = source.empty() ? std::string() : source + ": ";
    if (line != 0) out += "line " + std::to_string(line) + ": ";
    return out + detail;
  }

  std::size_t line_;
  std::string detail_;
};

}  // namespace ocecal
