#pragma once

#include <stdexcept>
#include <string>

namespace dil {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-square matrices, NaN entries, unknown ids, bad grids.
class MalformedInput : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class DegenerateCurve : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// bar_generalize precondition failure; `witness` is the undercovered point index.
class DensityError : public Error {
 public:
  DensityError(const std::string& what, bool in_source, int witness);
  bool in_source;
  int witness;
};

/// Shooting did not converge.
class NoLog : public Error {
 public:
  NoLog(const std::string& what, double residual);
  double residual;
};

/// A Psi-word left the nesting radius at step `step`.
class NestingError : public Error {
 public:
  NestingError(const std::string& what, int step);
  int step;
};

}  // namespace dil
