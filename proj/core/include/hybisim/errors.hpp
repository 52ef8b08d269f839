#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybisim {

// Raised when text input (expression, constraint, or model file) is malformed.
// `position` is a 0-based character offset into the offending line or text
// when known, std::string::npos otherwise.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position = std::string::npos)
        : std::runtime_error(what), pos(position) {}
    std::size_t pos;
};

// Raised when an expression references a variable absent from the declared
// variable list, or when a parsed model fails cross-reference resolution.
class LinkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when evaluating an expression produces a non-finite value
// (division by zero, sqrt of a negative, overflow).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the numeric layer: integration failures, unclassifiable points,
// ambiguous successor resolution, grid construction on unsupported geometry.
class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hybisim
