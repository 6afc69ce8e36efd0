#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace plapsys {

// Argument outside the domain of a formula (negative radius, k < 0, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameters do not satisfy the hypotheses an operation needs.
struct RegimeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iterative method or quadrature did not reach its tolerance.
struct ConvergenceError : std::runtime_error {
    std::vector<double> trace;
    ConvergenceError(const std::string& what, std::vector<double> tr = {})
        : std::runtime_error(what), trace(std::move(tr)) {}
};

struct ConfigError : std::runtime_error {
    int line;
    std::string key;
    ConfigError(const std::string& what, int line_no = 0, std::string k = {})
        : std::runtime_error(what), line(line_no), key(std::move(k)) {}
};

}  // namespace plapsys
