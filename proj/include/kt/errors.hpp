#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kt {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Input / configuration problems. The CLI maps these to exit code 1.
// ---------------------------------------------------------------------------

struct SchemaError : Error {
  using Error::Error;
};

struct SyntaxError : SchemaError {
  std::size_t offset;    // byte offset of the first offending character
  std::string expected;  // what the parser was looking for
  SyntaxError(std::size_t off, std::string exp)
      : SchemaError("syntax error at offset " + std::to_string(off) +
                    ": expected " + exp),
        offset(off),
        expected(std::move(exp)) {}
};

struct UnknownIdentifier : SchemaError {
  std::string name;
  std::size_t offset;
  UnknownIdentifier(std::string n, std::size_t off)
      : SchemaError("unknown identifier '" + n + "' at offset " +
                    std::to_string(off)),
        name(std::move(n)),
        offset(off) {}
};

// ---------------------------------------------------------------------------
// Domain / geometry problems. The CLI maps these to exit code 2.
// ---------------------------------------------------------------------------

struct GeometryError : Error {
  using Error::Error;
};

struct DomainExceeded : GeometryError {
  using GeometryError::GeometryError;
};

struct DegenerateMetric : GeometryError {
  using GeometryError::GeometryError;
};

struct ZeroSpeed : GeometryError {
  using GeometryError::GeometryError;
};

struct NotClosed : GeometryError {
  using GeometryError::GeometryError;
};

struct NotGeodesic : GeometryError {
  using GeometryError::GeometryError;
};

struct IntersectionIllConditioned : GeometryError {
  using GeometryError::GeometryError;
};

struct ZeroAtInteriorUnresolved : GeometryError {
  using GeometryError::GeometryError;
};

struct DegenerateVertexAngle : GeometryError {
  using GeometryError::GeometryError;
};

struct InconsistentOrientation : GeometryError {
  using GeometryError::GeometryError;
};

// ---------------------------------------------------------------------------
// Tolerance failures (numerics out of budget). The CLI maps these to exit 3.
// ---------------------------------------------------------------------------

struct ToleranceExceeded : Error {
  using Error::Error;
};

}  // namespace kt
