#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kanedge {

// Base of every error raised by the toolkit. Each subclass maps to one CLI
// exit code (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NoFeasibleStartError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

class SingularFitError : public Error {
 public:
  SingularFitError(const std::string& what, std::vector<std::size_t> basis)
      : Error(what), basis_(std::move(basis)) {}

  // Basis indices whose columns left the design rank-deficient.
  const std::vector<std::size_t>& basis() const noexcept { return basis_; }

 private:
  std::vector<std::size_t> basis_;
};

}  // namespace kanedge
