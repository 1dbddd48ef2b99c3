#pragma once

#include <stdexcept>
#include <string>

namespace kbf {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class SizeLimitExceeded : public Error {
public:
  using Error::Error;
};

class NonFiniteEntry : public Error {
public:
  using Error::Error;
};

class NotHermitian : public Error {
public:
  using Error::Error;
};

class NotPsd : public Error {
public:
  using Error::Error;
};

class NoConvergence : public Error {
public:
  using Error::Error;
};

class BadParameters : public Error {
public:
  using Error::Error;
};

class UnknownName : public Error {
public:
  using Error::Error;
};

// File-format errors carry the offending field path (e.g. "x_vectors[2][1]").
class ParseError : public Error {
public:
  using Error::Error;
};

class SchemaError : public Error {
public:
  SchemaError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

} // namespace kbf
