#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace algcon {

/// Base class for recoverable runtime failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The expected graph is degenerate for the requested operation
/// (zero Laplacian, disconnected graph where a gap is required, ...).
class DegenerateGraphError : public Error {
 public:
  using Error::Error;
};

/// The power-iteration iterate was annihilated (||B2 x|| below threshold).
class DegenerateIterateError : public Error {
 public:
  using Error::Error;
};

/// A consensus round hit its iteration cap before every node converged.
class RoundTimeoutError : public Error {
 public:
  RoundTimeoutError(std::string what, std::vector<double> partial, std::size_t iters)
      : Error(std::move(what)), partial_(std::move(partial)), iters_(iters) {}

  const std::vector<double>& partial() const noexcept { return partial_; }
  std::size_t iters() const noexcept { return iters_; }

 private:
  std::vector<double> partial_;
  std::size_t iters_;
};

/// Invalid experiment configuration; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace algcon
