#pragma once

#include <stdexcept>
#include <string>

namespace cavsim {

/// Status codes shared with the C API (see cavsim.h). Keep the numbering stable.
enum class Status : int {
  ok = 0,
  invalid_argument = 1,
  parse = 2,
  unknown_key = 3,
  constraint = 4,
  domain = 5,
  underflow = 6,
  stiffness = 7,
  input = 8,
  calibration = 9,
  fit = 10,
  no_oscillation = 11,
  io = 12,
  internal = 13,
};

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(Status::domain, w) {}
};
struct InputError : Error {
  explicit InputError(const std::string& w) : Error(Status::input, w) {}
};
struct ConstraintError : Error {
  explicit ConstraintError(const std::string& w) : Error(Status::constraint, w) {}
};
struct CalibrationError : Error {
  explicit CalibrationError(const std::string& w) : Error(Status::calibration, w) {}
};
struct FitError : Error {
  explicit FitError(const std::string& w) : Error(Status::fit, w) {}
};
struct NoOscillation : Error {
  explicit NoOscillation(const std::string& w) : Error(Status::no_oscillation, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(Status::io, w) {}
};

}  // namespace cavsim
