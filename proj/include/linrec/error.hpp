#pragma once

#include <stdexcept>
#include <string>

namespace linrec {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed concrete syntax; line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct Diagnostic {
    std::string code;
    std::string location;
    std::string explanation;
};

class TypeError : public Error {
public:
    explicit TypeError(Diagnostic d)
        : Error(d.code + " at " + d.location + ": " + d.explanation), diag_(std::move(d)) {}
    const Diagnostic& diagnostic() const { return diag_; }

private:
    Diagnostic diag_;
};

// A value grew past the configured bit-length ceiling.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

// Something the theory rules out happened; always a bug in this code.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

class DecompositionMismatch : public Error {
public:
    using Error::Error;
};

class WrongLabel : public Error {
public:
    using Error::Error;
};

class NonStandardDerivation : public Error {
public:
    using Error::Error;
};

} // namespace linrec
