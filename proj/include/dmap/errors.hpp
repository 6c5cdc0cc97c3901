#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmap {

/// Base of every error thrown by the library. `exit_code()` is the process
/// status reported by the command-line front end.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// The neighborhood graph splits into more than one connected component, so
/// the Markov chain is not irreducible.
class DisconnectedGraphError : public Error {
 public:
  DisconnectedGraphError(const std::string& what, std::size_t components)
      : Error(what), components_(components) {}
  std::size_t components() const noexcept { return components_; }
  int exit_code() const noexcept override { return 3; }

 private:
  std::size_t components_;
};

/// A row of the kernel has zero mass.
class IsolatedPointError : public DisconnectedGraphError {
 public:
  IsolatedPointError(const std::string& what, std::vector<std::size_t> indices)
      : DisconnectedGraphError(what, indices.size()), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

class TrainingDivergenceError : public Error {
 public:
  TrainingDivergenceError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }
  int exit_code() const noexcept override { return 4; }

 private:
  int epoch_;
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

/// Iterative eigensolver ran out of restarts. Carries the residual norms of the
/// wanted Ritz pairs at the last restart.
class EigensolverError : public Error {
 public:
  EigensolverError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace dmap
