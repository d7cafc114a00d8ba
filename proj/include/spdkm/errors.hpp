#pragma once

#include <stdexcept>
#include <string>

namespace spdkm {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input is not (numerically) symmetric positive definite.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Operands disagree in dimension, or a coordinate vector has an impossible length.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Requested more clusters than there are points.
class KExceedsN : public Error {
 public:
  using Error::Error;
};

// Symmetric eigensolver failed to converge.
class EigenFailure : public Error {
 public:
  using Error::Error;
};

// Series has zero sample variance; its autocovariance matrix cannot be made
// meaningfully positive definite.
class ConstantSeries : public Error {
 public:
  using Error::Error;
};

// Patch averaging left an empty grid.
class DegenerateOutput : public Error {
 public:
  using Error::Error;
};

class DegenerateGroups : public Error {
 public:
  using Error::Error;
};

class DegenerateSeries : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// A parameter combination that can never be valid (non-positive patch size,
// lag too large for the series length, ...).
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// A value-level argument violation not covered by a more specific error
// (non-finite coordinates, a malformed triangular factor, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File missing, unreadable, or not a well-formed tensor/CSV.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spdkm
