#pragma once

#include <stdexcept>
#include <string>

namespace depxfer {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (bad column count, bad integer, ...).
struct ParseError : Error {
    using Error::Error;
};

// Structurally invalid data (cyclic heads, multi-root, shape mismatch).
struct ValidationError : Error {
    using Error::Error;
};

// No tree is feasible under the current arc mask.
struct EmptyChartError : Error {
    using Error::Error;
};

// Determinant or chart quantity came out non-finite.
struct NumericalError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace depxfer
