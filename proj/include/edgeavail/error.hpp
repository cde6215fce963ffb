#ifndef EDGEAVAIL_ERROR_HPP
#define EDGEAVAIL_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgeavail {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (expressions, model documents, fault trees).
class SyntaxError : public Error
{
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& message)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column)
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed text describing an inconsistent model.
class SemanticError : public Error
{
public:
    using Error::Error;
};

class EvaluationError : public Error
{
public:
    using Error::Error;
};

class UnknownIdentifier : public EvaluationError
{
public:
    using EvaluationError::EvaluationError;
};

class DivisionByZero : public EvaluationError
{
public:
    using EvaluationError::EvaluationError;
};

class NotEnabled : public Error
{
public:
    using Error::Error;
};

class NegativeTokens : public Error
{
public:
    using Error::Error;
};

class StateSpaceExceeded : public Error
{
public:
    using Error::Error;
};

class VanishingLoop : public Error
{
public:
    using Error::Error;
};

class NotIrreducible : public Error
{
public:
    using Error::Error;
};

class UnknownReward : public Error
{
public:
    using Error::Error;
};

class NotConverged : public Error
{
public:
    NotConverged(std::size_t iterations, double residual)
    : Error("no convergence after " + std::to_string(iterations) + " iterations (last change "
            + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual)
    {
    }

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

class VanishingLivelock : public Error
{
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error
{
public:
    using Error::Error;
};

} // namespace edgeavail

#endif // EDGEAVAIL_ERROR_HPP
