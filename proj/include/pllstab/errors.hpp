#pragma once

#include <stdexcept>
#include <string>

namespace pllstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |Z_g + Z'_l| vanished while reducing the network.
class SingularNetworkError : public Error {
 public:
  using Error::Error;
};

/// |P_m / P_e| > 1: the PLL has no operating point to lock onto.
class NoEquilibriumError : public Error {
 public:
  using Error::Error;
};

/// A parameter set violated a documented invariant.
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state during integration.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double t_last, double delta_last,
                   double omega_last)
      : Error(what), t_last(t_last), delta_last(delta_last),
        omega_last(omega_last) {}
  double t_last;
  double delta_last;
  double omega_last;
};

/// Polynomial operation would exceed the storage degree.
class DegreeOverflowError : public Error {
 public:
  using Error::Error;
};

/// Homogeneous Lie-derivative operator is singular (m1*l1 + m2*l2 ~ 0).
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// Linear part at the expansion point is not Hurwitz.
class NotHurwitzError : public Error {
 public:
  using Error::Error;
};

/// Jacobian at a supposed UEP has no positive real eigenvalue.
class NotASaddleError : public Error {
 public:
  using Error::Error;
};

class ClassificationInconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Zubov critical-level search found no dV/dt = 0 locus inside the window.
class WindowTooSmallError : public Error {
 public:
  using Error::Error;
};

/// ATRM level set escaped the search window or lost star-shapedness.
class EvolutionDivergedError : public Error {
 public:
  using Error::Error;
};

/// ATRM tangency never reached within the time budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

/// Parse or validation error in a run configuration. `line` is 1-based,
/// 0 when the error is not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  int line;
};

}  // namespace pllstab
