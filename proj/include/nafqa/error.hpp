#pragma once

#include <stdexcept>
#include <string>

namespace nafqa {

/// Base class for all library errors. Each kind maps onto a CLI exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid input: malformed files, violated preconditions, bad configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// The signed ensemble normalization dropped to zero or below.
class NormalizationError : public Error {
 public:
  NormalizationError(const std::string& what, std::size_t layer)
      : Error(what), layer_(layer) {}
  std::size_t layer() const noexcept { return layer_; }
  int exit_code() const noexcept override { return 3; }

 private:
  std::size_t layer_;
};

/// Step-size or stability guard tripped (jump probabilities, Hermiticity drift).
class NumericGuardError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace nafqa
