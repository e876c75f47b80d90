#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace phibvp {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bracket expansion or bisection ran past its iteration cap.
class IterationCap : public Error {
public:
    using Error::Error;
};

// Expression evaluation hit an undefined point (division by zero, log of a
// non-positive number, ...). `position` is the byte offset of the node.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t position, std::string message, std::string found)
        : Error("parse error at position " + std::to_string(position) + ": " + message +
                (found.empty() ? std::string(" (found end of input)") : " (found '" + found + "')")),
          position_(position), message_(std::move(message)), found_(std::move(found)) {}

    std::size_t position() const { return position_; }
    const std::string& message() const { return message_; }
    const std::string& found() const { return found_; }

private:
    std::size_t position_;
    std::string message_;
    std::string found_;
};

// A problem or model violates a construction invariant. `field` is a dotted
// path such as "bc.alpha" when the value came from a problem file.
class InvalidProblem : public Error {
public:
    InvalidProblem(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class NonConvergence : public Error {
public:
    NonConvergence(double lambda_reached, double last_residual)
        : Error(format(lambda_reached, last_residual)),
          lambda_reached_(lambda_reached), last_residual_(last_residual) {}
    double lambda_reached() const { return lambda_reached_; }
    double last_residual() const { return last_residual_; }

private:
    static std::string format(double lambda, double residual) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "continuation stalled at lambda=%.6g (last residual %.3g)",
                      lambda, residual);
        return buf;
    }

    double lambda_reached_;
    double last_residual_;
};

// The shooting map showed no sign change; the oracle does not apply.
class NoBracket : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace phibvp
