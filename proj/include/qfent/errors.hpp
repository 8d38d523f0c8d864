#pragma once

#include <stdexcept>
#include <string>

namespace qfent {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: files, target specs, CLI grammars.
struct ParseError : Error {
  using Error::Error;
};

// Arguments outside the documented domain (bad interval, alpha out of range, ...).
struct DomainError : Error {
  using Error::Error;
};

// A target or construction that cannot satisfy its contract.
struct ConstructionError : Error {
  using Error::Error;
};

// Resource limit hit: node budget, grid budget, interval budget.
struct BudgetError : Error {
  using Error::Error;
};

// Numerical routine did not meet its tolerance.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace qfent
