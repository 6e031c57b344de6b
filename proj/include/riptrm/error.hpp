#pragma once

#include <stdexcept>
#include <string>

namespace riptrm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: shape mismatch, asymmetric input, bad parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// Raised when a barrier quantity is requested at a point with some g_i(x) <= 0.
class NotStrictlyFeasible : public Error {
 public:
  using Error::Error;
};

/// A state that the algorithm's invariants rule out, e.g. nonpositive duals
/// passed to the condensed operator.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// A numerical routine finished but its post-conditions do not hold.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// A manifold operation produced a point that fails the membership test.
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

class FeasibilityFailure : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace riptrm
