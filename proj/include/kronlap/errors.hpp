#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kronlap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes, mode indices or dimension splits that do not fit together.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A dense materialization or Kronecker product would exceed the configured cap.
class SizeLimitError : public Error {
public:
    using Error::Error;
};

/// An operation precondition on the numeric content of its input does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Pivoted elimination met a pivot below tolerance.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot)
        : Error(what), pivot_(pivot) {}
    double pivot() const noexcept { return pivot_; }

private:
    double pivot_;
};

/// File system failures and malformed input files.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed Matrix Market content; carries the 1-based line number.
class ParseError : public IoError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& msg)
        : IoError(path + ":" + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace kronlap
