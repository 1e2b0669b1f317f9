#pragma once

#include <stdexcept>
#include <string>

namespace netlisna {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown vertex, edge, or replicate id.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition was violated (bad order, wrong path kind, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// No path joins the requested vertices under the requested traversal.
class NoPathError : public Error {
 public:
  using Error::Error;
};

/// The quantity is mathematically undefined for this input (empty edge set,
/// zero variance, zero total weight, zero denominator).
class UndefinedValueError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data. Messages carry the offending row.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace netlisna
