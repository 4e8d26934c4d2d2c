#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wbansim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration field is outside its permitted range.
class RangeError : public Error {
 public:
  RangeError(std::string field, const std::string& detail)
      : Error("out of range: " + field + " (" + detail + ")"), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Copies would overlap on air: retransmit delay shorter than one frame.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(std::move(reason)) {}
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class UnknownKey : public Error {
 public:
  UnknownKey(std::size_t line, std::string name)
      : Error("line " + std::to_string(line) + ": unknown key '" + name + "'"), line_(line), name_(std::move(name)) {}
  std::size_t line() const { return line_; }
  const std::string& name() const { return name_; }

 private:
  std::size_t line_;
  std::string name_;
};

class TimeTravelError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class MismatchError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace wbansim
