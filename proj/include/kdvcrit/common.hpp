#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kdvcrit {

using Complex = std::complex<double>;
using Complex3 = std::array<Complex, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Cyclic index helper for the j+1, j+2 sums (0-based, period 3).
constexpr int cyc(int j) { return ((j % 3) + 3) % 3; }

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the integer/pair arguments does not hold
/// (e.g. a Type-2 mode requested for a pair with 2k+l not divisible by 3).
class DomainError : public Error {
public:
  using Error::Error;
};

/// The pair is diagonal (k == l); an eta-root vanishes.
class DegeneratePairError : public DomainError {
public:
  using DomainError::DomainError;
};

/// The pair is not in the class the construction requires.
class PairClassError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Evaluation too close to a zero of the boundary determinant Q(tau).
class PoleError : public Error {
public:
  using Error::Error;
};

/// An iterative numerical procedure failed to reach its tolerance.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Internal sanity check failed (should never happen).
class InconsistencyError : public Error {
public:
  using Error::Error;
};

/// Simulation refused or aborted.
class SimulationError : public Error {
public:
  using Error::Error;
};

/// Initial data or control outside the small-data regime.
class SmallDataError : public SimulationError {
public:
  using SimulationError::SimulationError;
};

}  // namespace kdvcrit
