#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace behavsteg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A record could not be decoded. Carries the 1-based input line and the
/// offending field name.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& detail);

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// A value is well-formed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidWindowError : public Error {
 public:
  using Error::Error;
};

/// The requested operation cannot carry (or schedule) the payload.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what,
                         std::optional<std::size_t> max_bits = std::nullopt)
      : Error(what), max_bits_(max_bits) {}

  std::optional<std::size_t> max_bits() const noexcept { return max_bits_; }

 private:
  std::optional<std::size_t> max_bits_;
};

/// Channel corruption detected on the receiving side.
class DecodeError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace behavsteg
