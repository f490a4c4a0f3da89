#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hibshrink {

// Numeric codes double as CLI exit codes.
enum class ErrorCode : int {
    numeric = 1,
    domain = 2,
    convergence = 3,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

class DomainError : public Error {
  public:
    explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

class NumericError : public Error {
  public:
    explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

// A series ran out of terms. Carries the partial sum so callers can report it.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double partial, std::size_t terms_used)
        : Error(ErrorCode::convergence, what), partial_(partial), terms_used_(terms_used) {}
    double partial_value() const noexcept { return partial_; }
    std::size_t terms_used() const noexcept { return terms_used_; }

  private:
    double partial_;
    std::size_t terms_used_;
};

// Adaptive quadrature hit its depth limit before meeting tolerance.
class AccuracyError : public Error {
  public:
    AccuracyError(const std::string& what, double estimate, double error_bound)
        : Error(ErrorCode::numeric, what), estimate_(estimate), bound_(error_bound) {}
    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return bound_; }

  private:
    double estimate_;
    double bound_;
};

}  // namespace hibshrink
