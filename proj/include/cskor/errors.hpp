#pragma once

#include <stdexcept>
#include <string>

namespace cskor {

/// Bad input: malformed spec strings, out-of-domain arguments, violated
/// preconditions. Maps to CLI exit status 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// The input law is a point mass; the image domain would collapse to a point.
class DegenerateError : public ValidationError {
public:
    DegenerateError() : ValidationError("degenerate: the domain would degenerate to a point") {}
    explicit DegenerateError(const std::string& what) : ValidationError(what) {}
};

/// A numeric procedure failed to converge or hit a hard cap. Maps to CLI
/// exit status 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cskor
