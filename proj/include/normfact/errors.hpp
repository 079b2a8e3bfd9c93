#pragma once

#include <stdexcept>
#include <string>

namespace normfact {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// The norming functional of the zero vector is undefined; callers treat
/// this as a rank-termination signal during deflation.
class NormingOfZero : public Error {
public:
  using Error::Error;
};

/// Solver invoked on an all-zero matrix.
class ZeroMatrix : public Error {
public:
  using Error::Error;
};

/// Iteration budget exhausted before the stopping test was met.
class NoConvergence : public Error {
public:
  using Error::Error;
};

/// Sign enumeration would exceed the configured cap.
class TooLarge : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class NotSymmetric : public Error {
public:
  using Error::Error;
};

/// Requested a symmetric decomposition with conjugate pairs that are not
/// transposition invariant, i.e. (r, r1) != (p1, p).
class NotTranspositionInvariant : public Error {
public:
  using Error::Error;
};

/// Gram matrix has a significantly negative eigenvalue; the dissimilarities
/// are not Euclidean.
class NotPSD : public Error {
public:
  using Error::Error;
};

/// A metric matrix failed the symmetric positive-definiteness check.
class MetricNotPD : public Error {
public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace normfact
