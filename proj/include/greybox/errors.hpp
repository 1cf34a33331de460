#pragma once

#include <stdexcept>
#include <string>

namespace greybox {

// Base of every error thrown by the library. The C API maps the subclasses
// onto its status codes (parse = 2, usage = 3, numerical = 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        if (line <= 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }

    int line_;
    int column_;
};

// Bad arguments, unknown identifiers, violated preconditions.
class UsageError : public Error {
public:
    using Error::Error;
};

// Numerical breakdown: repeated modes, tracking failures, rank deficiency.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace greybox
