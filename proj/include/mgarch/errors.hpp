#pragma once

#include <stdexcept>
#include <string>

namespace mgarch {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical errors (matrix conditioning, filter overflow, optimizer state).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Input/format errors (CSV, configuration documents, bad arguments).
class ParseError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonPositiveDiagonal : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateColumn : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonPositivePrice : public ParseError {
 public:
  using ParseError::ParseError;
};

class EmptyIntersection : public ParseError {
 public:
  using ParseError::ParseError;
};

class TooShort : public ParseError {
 public:
  using ParseError::ParseError;
};

class SingularDesign : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularGamma0 : public NumericError {
 public:
  using NumericError::NumericError;
};

class ZeroNormColumn : public NumericError {
 public:
  using NumericError::NumericError;
};

class InvalidParams : public ParseError {
 public:
  using ParseError::ParseError;
};

class FilterBlowup : public NumericError {
 public:
  using NumericError::NumericError;
};

class FilterBlowupAtOptimum : public NumericError {
 public:
  using NumericError::NumericError;
};

class HessianNotPD : public NumericError {
 public:
  using NumericError::NumericError;
};

class NotNested : public ParseError {
 public:
  using ParseError::ParseError;
};

class WindowTooLong : public ParseError {
 public:
  using ParseError::ParseError;
};

class TooFewReplications : public ParseError {
 public:
  using ParseError::ParseError;
};

class ExplosiveParameters : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace mgarch
