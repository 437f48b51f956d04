#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prox {

/// Root of every error raised by the toolchain.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), detail_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

/// A well-formed document referring to something that does not exist.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class TypeError : public Error {
public:
    using Error::Error;
};

/// Runtime failure while evaluating a term, condition, filter or query.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class UnboundName : public EvaluationError {
public:
    explicit UnboundName(const std::string& name)
        : EvaluationError("unbound name '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnboundPlaceholder : public EvaluationError {
public:
    explicit UnboundPlaceholder(const std::string& placeholder)
        : EvaluationError("unbound placeholder '@" + placeholder + "'") {}
};

/// Statement that parses but breaks a static rule of the effect language
/// (single assignment, single-table updates, placeholder totality).
class StaticViolation : public Error {
public:
    using Error::Error;
};

class ReadOnlyViolation : public Error {
public:
    explicit ReadOnlyViolation(const std::string& table)
        : Error("table '" + table + "' is read-only") {}
};

class UnknownTable : public Error {
public:
    explicit UnknownTable(const std::string& table) : Error("unknown table '" + table + "'") {}
};

class EncodingError : public Error {
public:
    using Error::Error;
};

class GherkinError : public Error {
public:
    GherkinError(std::size_t clause, const std::string& message)
        : Error("clause " + std::to_string(clause) + ": " + message), clause_(clause) {}
    std::size_t clause() const noexcept { return clause_; }

private:
    std::size_t clause_;
};

/// Operation invoked on an input that does not satisfy its precondition
/// (for example encoding a model that has validation diagnostics).
class PreconditionNotMet : public Error {
public:
    using Error::Error;
};

class EffectError : public Error {
public:
    using Error::Error;
};

class InvalidTrace : public Error {
public:
    InvalidTrace(std::size_t step, const std::string& message)
        : Error("step " + std::to_string(step) + ": " + message), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace prox
