// Error hierarchy shared by every clockforge module.
#pragma once

#include <stdexcept>
#include <string>

namespace clockforge {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (t < 0, tau <= 0, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Window with theta1 <= theta0.
class InvalidWindowError : public Error {
  public:
    using Error::Error;
};

/// Anomaly schedule violates its invariants (overlapping variance windows,
/// negative epochs, missing burst sigmas, ...).
class ScheduleError : public Error {
  public:
    using Error::Error;
};

/// An anomaly epoch or averaging time that does not sit on the sampling grid.
class MisalignedEpochError : public ScheduleError {
  public:
    MisalignedEpochError(const std::string &what, double value)
        : ScheduleError(what), value_(value) {}
    [[nodiscard]] double value() const noexcept { return value_; }

  private:
    double value_;
};

class ShapeError : public Error {
  public:
    using Error::Error;
};

class NotPsdError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

/// No closed form is available; the caller should fall back to Monte Carlo.
class UnsupportedAnalyticError : public Error {
  public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Malformed scenario configuration. Carries the offending line (0 if unknown).
class ConfigError : public Error {
  public:
    ConfigError(const std::string &what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

  private:
    int line_;
};

} // namespace clockforge
