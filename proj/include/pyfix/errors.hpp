#pragma once

#include <stdexcept>
#include <string>

namespace pyfix {

enum class ErrorCode {
  OracleUnavailable,
  ParseFailure,
  BackendUnavailable,
  RateLimited,
  FixtureMissing,
  EmptyExplanation,
  MissingRating,
  NoFeasiblePoint,
  SchemaError,
  DatasetTooSmall,
  UsageError,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Base for all library errors; carries a stable code so callers can
/// dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class OracleUnavailable : public Error {
 public:
  explicit OracleUnavailable(const std::string& what) : Error(ErrorCode::OracleUnavailable, what) {}
};

class ParseFailure : public Error {
 public:
  explicit ParseFailure(const std::string& what) : Error(ErrorCode::ParseFailure, what) {}
};

class BackendUnavailable : public Error {
 public:
  explicit BackendUnavailable(const std::string& what) : Error(ErrorCode::BackendUnavailable, what) {}
};

class RateLimited : public Error {
 public:
  explicit RateLimited(const std::string& what) : Error(ErrorCode::RateLimited, what) {}
};

class FixtureMissing : public Error {
 public:
  explicit FixtureMissing(const std::string& what) : Error(ErrorCode::FixtureMissing, what) {}
};

class EmptyExplanation : public Error {
 public:
  explicit EmptyExplanation(const std::string& what) : Error(ErrorCode::EmptyExplanation, what) {}
};

class MissingRating : public Error {
 public:
  explicit MissingRating(const std::string& what) : Error(ErrorCode::MissingRating, what) {}
};

class NoFeasiblePoint : public Error {
 public:
  explicit NoFeasiblePoint(const std::string& what) : Error(ErrorCode::NoFeasiblePoint, what) {}
};

class SchemaError : public Error {
 public:
  SchemaError(int line, const std::string& what)
      : Error(ErrorCode::SchemaError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class DatasetTooSmall : public Error {
 public:
  explicit DatasetTooSmall(const std::string& what) : Error(ErrorCode::DatasetTooSmall, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorCode::UsageError, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::IoError, what) {}
};

}  // namespace pyfix
