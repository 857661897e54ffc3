#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ehsim {

/// An argument lies outside the domain of a circuit law or helper.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A closed-form law was evaluated past the time where its radicand turns negative.
class ValidityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid parameters, profile or scenario document.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No finite sleep interval can balance the duty cycle.
class NeverFeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simulation could not make progress (event refinement failed or state chattered).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed measured-trace input. Row and column are 1-based; column 0 means whole row.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : std::runtime_error(format(row, column, what)), row_(row), column_(column) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    static std::string format(std::size_t row, std::size_t column, const std::string& what) {
        std::string out = "row " + std::to_string(row);
        if (column != 0) out += ", column " + std::to_string(column);
        return out + ": " + what;
    }

    std::size_t row_;
    std::size_t column_;
};

/// Simulated and measured traces share no time interval.
class NoOverlapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ehsim
