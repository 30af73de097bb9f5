#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlfp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A diagnostic was asked to run outside the hypotheses it relies on.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve hit its iteration cap with the residual above tolerance.
/// Carries the max-norm residual after every iteration.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace nlfp
