#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Input for which the requested quantity is not defined (e.g. crossovers of an
/// isotropic material, theta_max of a vanishing torque).
class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double achieved_error)
        : Error(what + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

  private:
    double achieved_error_;
};

/// A root search whose bracket does not enclose a sign change.
class BracketError : public Error {
  public:
    BracketError(const std::string& what, double f_lo, double f_hi)
        : Error(what), f_lo_(f_lo), f_hi_(f_hi) {}

    double f_lo() const noexcept { return f_lo_; }
    double f_hi() const noexcept { return f_hi_; }

  private:
    double f_lo_, f_hi_;
};

/// Malformed or invalid material database.
class MaterialDataError : public Error {
  public:
    MaterialDataError(const std::string& field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Round-trip determinant came out non-positive; indicates inconsistent
/// reflection-matrix conventions rather than a physical state.
class ReflectionConventionError : public Error {
  public:
    using Error::Error;
};

}  // namespace casimir
