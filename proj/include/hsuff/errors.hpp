#pragma once

#include "hsuff/rational.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsuff {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Policy horizon, table shape or action support disagrees with the MDP.
class PolicyMismatch : public Error {
public:
    using Error::Error;
};

/// Observation model does not fit the MDP, or two distributions were built
/// under different models.
class ModelMismatch : public Error {
public:
    using Error::Error;
};

class InvalidParam : public Error {
public:
    using Error::Error;
};

class InvalidTrajectory : public Error {
public:
    using Error::Error;
};

/// Raised by the policy enumerator once `cap` policies have been produced
/// and more remain.
class CapExceeded : public Error {
public:
    CapExceeded(BigInt total, std::size_t cap)
        : Error("policy enumeration truncated: " + total.str() + " policies exceed cap " +
                std::to_string(cap)),
          total_(std::move(total)),
          cap_(cap) {}

    const BigInt& total() const { return total_; }
    std::size_t cap() const { return cap_; }

private:
    BigInt total_;
    std::size_t cap_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                what),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "invalid MDP";
        for (const auto& item : items) out += "; " + item;
        return out;
    }

    std::vector<std::string> violations_;
};

}  // namespace hsuff
