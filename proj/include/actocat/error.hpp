#pragma once

#include <stdexcept>
#include <string>

namespace actocat {

// Root of all library errors. Subclasses identify the failure category so
// callers (and the CLI exit-code mapping) can react without string matching.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input file lacks a mandatory column or has an unusable header.
class SchemaError : public Error {
public:
  using Error::Error;
};

// Input exists but nothing usable could be parsed from it.
class ParseError : public Error {
public:
  using Error::Error;
};

// Timestamps out of order beyond the tolerated reorder window.
class OrderingError : public Error {
public:
  using Error::Error;
};

// Behavior name not present in the configured taxonomy.
class TaxonomyError : public Error {
public:
  using Error::Error;
};

// Overlapping label events disagree about the activity class.
class ConflictError : public Error {
public:
  using Error::Error;
};

// Required coverage (label seconds, day contexts) is missing.
class CoverageError : public Error {
public:
  using Error::Error;
};

// Invalid argument value (negative threshold, empty input, bad window).
class ParamError : public Error {
public:
  using Error::Error;
};

// Non-finite values or impossible arithmetic (zero dt).
class NumericError : public Error {
public:
  using Error::Error;
};

// Computation is undefined on this data (zero variance, single-class ROC).
class DegenerateError : public Error {
public:
  using Error::Error;
};

// Two series share no common time span.
class AlignmentError : public Error {
public:
  using Error::Error;
};

// No sunrise/sunset exists for the requested date/latitude.
class NoEventError : public Error {
public:
  using Error::Error;
};

}  // namespace actocat
