#pragma once

#include <stdexcept>
#include <string>

namespace softarm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid is too small for the requested stencil, or two fields disagree in size.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Configuration or schema violation detected before any solve.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The optimization problem has no meaningful solution as posed.
class IllPosedProblem : public Error {
 public:
  using Error::Error;
};

/// A linear system that should be nonsingular was not.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its caps before meeting its tolerances.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A time integration blew up. `step()` is the macro step at which it was detected.
class NumericalInstability : public Error {
 public:
  NumericalInstability(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace softarm
