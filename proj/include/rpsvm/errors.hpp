#pragma once

#include <stdexcept>
#include <string>

namespace rpsvm {

// Thrown when an input exceeds a configured desk-scale cap.
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a training problem is structurally unsolvable (e.g. one class).
class degenerate_problem_error : public std::runtime_error {
public:
    explicit degenerate_problem_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a text input cannot be parsed; carries a 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    size_t line() const { return line_; }

private:
    size_t line_;
};

// Thrown when a margin is requested for a zero weight vector.
class undefined_margin_error : public std::runtime_error {
public:
    explicit undefined_margin_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a preservation bound cannot be evaluated because the measured
// discrepancy makes it vacuous (e_norm >= 1).
class vacuous_bound_error : public std::runtime_error {
public:
    explicit vacuous_bound_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Generic numerical failure (non-convergence where convergence is required).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rpsvm
