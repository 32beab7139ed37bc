#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bcdi {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid shapes that violate an operation's preconditions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters: spectra, solver or retrieval configs, run configs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised when an iteration produces non-finite values or blows up.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration, double last_epsilon)
      : Error(what), iteration_(iteration), last_epsilon_(last_epsilon) {}

  std::size_t iteration() const noexcept { return iteration_; }
  double last_epsilon() const noexcept { return last_epsilon_; }

 private:
  std::size_t iteration_;
  double last_epsilon_;
};

}  // namespace bcdi
