#pragma once

#include <stdexcept>
#include <string>

namespace qgfid {

// Every failure raised by the library derives from Error so callers can
// catch the whole family at once.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of the operation (w = 0 for Θ, q out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A series, product or iteration hit its term/iteration budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// The q-homotopy iterate left the lower half-plane and step halving could not
// bring it back.
class BranchEscape : public Error {
 public:
  using Error::Error;
};

class QuadFailure : public Error {
 public:
  using Error::Error;
};

// real_critical_points found no sign change of g_q' inside the search bound.
class NoneFound : public Error {
 public:
  using Error::Error;
};

// Curve tracing could not hold the residual tolerance.
class StallError : public Error {
 public:
  using Error::Error;
};

// g_q - target vanishes (or nearly so) on the contour being integrated.
class OnContourZero : public Error {
 public:
  using Error::Error;
};

// A computed quantity contradicts a property it must satisfy (negative
// density beyond roundoff, non-integer winding number).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace qgfid
