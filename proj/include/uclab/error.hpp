#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uclab/linalg.hpp"

namespace uclab {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// A point that must lie in the domain does not.
class DomainError : public Error {
 public:
  using Error::Error;
};

class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class EllipticityViolation : public Error {
 public:
  using Error::Error;
};

class UndefinedPointError : public Error {
 public:
  using Error::Error;
};

class DegenerateMassError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, Vec witness) : Error(what), witness_(witness) {}
  const Vec& witness() const { return witness_; }

 private:
  Vec witness_{};
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class RootNotFoundError : public Error {
 public:
  using Error::Error;
};

class DepthError : public Error {
 public:
  using Error::Error;
};

class EmptyRegionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside one stage of the end-to-end pipeline.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace uclab
