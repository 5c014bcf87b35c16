#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgefed {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchedulingInPast : public Error {
 public:
  using Error::Error;
};

/// A component transition failed. Carries the component id and virtual time.
class ComponentFault : public Error {
 public:
  ComponentFault(std::string component, double time_s, const std::string& what)
      : Error("component '" + component + "' failed at t=" + std::to_string(time_s) + "s: " + what),
        component_(std::move(component)),
        time_s_(time_s) {}

  const std::string& component() const noexcept { return component_; }
  double time_s() const noexcept { return time_s_; }

 private:
  std::string component_;
  double time_s_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

class UndefinedPue : public Error {
 public:
  using Error::Error;
};

class InvalidProfile : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MismatchedScenarios : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `location` is a line number for CSV and a byte
/// offset or key path for config documents.
class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& what)
      : Error("parse error at " + location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// Well-formed input that breaks a domain invariant. `invariant` names it;
/// `line` is set (non-zero) when the input came from a line-oriented file.
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& context, std::size_t line = 0)
      : Error((line ? "line " + std::to_string(line) + ": " : std::string()) + "validation failed (" + invariant +
              ")" + (context.empty() ? "" : ": " + context)),
        invariant_(std::move(invariant)),
        line_(line) {}
  const std::string& invariant() const noexcept { return invariant_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string invariant_;
  std::size_t line_;
};

class UnknownKey : public Error {
 public:
  explicit UnknownKey(std::string key_path)
      : Error("unknown config key '" + key_path + "'"), key_path_(std::move(key_path)) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace edgefed
