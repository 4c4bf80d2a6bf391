#pragma once

#include <stdexcept>
#include <string>

namespace subdiff {

// Base of every error raised by the library. The CLI maps each subclass to
// its own exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller mistakes such as an out-of-range order or tolerance.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Malformed edge-list input. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Empty graphs, unreachable targets, generators that cannot meet their
// connectivity requirement, path enumerations that exceed their cap.
class GraphError : public Error {
public:
    using Error::Error;
};

// Ill-conditioned solves and quadratures that fail to converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ParameterError(msg);
}

} // namespace detail
} // namespace subdiff
