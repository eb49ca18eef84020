#ifndef OPERC_ERRORS_HPP
#define OPERC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace operc {

/** Base class for all errors raised by this library. */
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A vertex with x+t odd was handed to a lattice operation.
struct InvalidVertexError : Error {
  using Error::Error;
};

// A vertex or frontier lies outside the window it was required to be in.
struct OutOfWindowError : Error {
  using Error::Error;
};

// The available window does not cover the light cone a query needs.
// Raised instead of silently truncating the computation.
struct InsufficientWindowError : Error {
  using Error::Error;
};

// No open path satisfying the requested property exists.
struct NoPathError : Error {
  using Error::Error;
};

// A vertex handed to a path-relative operation is not on the path,
// or a pair of path vertices is in the wrong order.
struct NotOnPathError : Error {
  using Error::Error;
};

struct NotInForestError : Error {
  using Error::Error;
};

// A genealogy query whose answer cannot be certified inside the window.
// Deliberately distinct from a certified negative answer.
struct UndecidableError : Error {
  using Error::Error;
};

// A precondition on arguments was violated (bad probability, bad margin,
// non-positive slope, ...).
struct ContractError : Error {
  using Error::Error;
};

// Too few survival-conditioned samples or records to form an estimate.
struct InsufficientDataError : Error {
  using Error::Error;
};

// Text input could not be parsed; line is 1-based.
struct ParseError : Error {
  long line;
  ParseError(long line_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// An experiment spec failed validation; names the offending field.
struct SpecValidationError : Error {
  std::string field;
  SpecValidationError(const std::string& field_, const std::string& msg)
      : Error("field '" + field_ + "': " + msg), field(field_) {}
};

}  // namespace operc

#endif  // OPERC_ERRORS_HPP
