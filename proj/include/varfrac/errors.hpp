#pragma once

#include <stdexcept>
#include <string>

namespace varfrac {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration: missing keys, degenerate geometry, empty sets.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Coefficient bound violated during assembly.
class AssemblyError : public Error {
 public:
  AssemblyError(const std::string& what, int node) : Error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Linear solver failure or non-convergence of an iteration.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Shifted problem requested at or above the principal eigenvalue.
class SpectralShiftError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BarrierError : public NumericalError {
 public:
  BarrierError(const std::string& what, int worst_node)
      : NumericalError(what), worst_node_(worst_node) {}
  int worst_node() const { return worst_node_; }

 private:
  int worst_node_;
};

}  // namespace varfrac
