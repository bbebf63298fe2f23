#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardinal {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the analyticity tube or otherwise off the model's domain.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::size_t coordinate)
        : Error(what), coordinate_(coordinate) {}
    std::size_t coordinate() const noexcept { return coordinate_; }

private:
    std::size_t coordinate_;
};

// Continuity tracking of a complex logarithm lost the branch.
class BranchError : public Error {
public:
    using Error::Error;
};

// A configuration is invalid; carries every violation found, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    explicit ConfigError(const std::string& violation)
        : ConfigError(std::vector<std::string>{violation}) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class OverflowError : public NumericError {
public:
    using NumericError::NumericError;
};

// Sampled function returned a non-finite value at grid index m.
class EvaluationError : public NumericError {
public:
    EvaluationError(const std::string& what, std::vector<int> index)
        : NumericError(what), index_(std::move(index)) {}
    const std::vector<int>& index() const noexcept { return index_; }

private:
    std::vector<int> index_;
};

// Quadrature box is too small for the integrand to have died off.
class BoxTooSmallError : public NumericError {
public:
    using NumericError::NumericError;
};

// A requested accuracy is unreachable within the configured caps.
class CapacityError : public NumericError {
public:
    CapacityError(const std::string& what, double best)
        : NumericError(what), best_(best) {}
    double best_achievable() const noexcept { return best_; }

private:
    double best_;
};

// Results disagree with their own error budget.
class ConsistencyError : public NumericError {
public:
    using NumericError::NumericError;
};

inline ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
          std::string msg = "invalid configuration";
          for (const auto& v : violations) msg += "; " + v;
          return msg;
      }()),
      violations_(std::move(violations)) {}

}  // namespace cardinal
