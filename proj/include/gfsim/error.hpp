#pragma once

#include <stdexcept>
#include <string>

namespace gfsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain where a formula or law is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A jump-measure integral that does not converge for the requested exponent.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The cumulant does not change sign inside the supplied bracket.
class NoSignChangeError : public Error {
 public:
  using Error::Error;
};

/// Compound-Poisson rate above the configured budget (jump cutoff too small).
class RateOverflowError : public Error {
 public:
  using Error::Error;
};

class EmptySupportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& msg)
      : Error("config error at line " + std::to_string(line) + ", key '" + key + "': " + msg),
        key_(key),
        line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace gfsim
