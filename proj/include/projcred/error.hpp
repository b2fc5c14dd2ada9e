#pragma once

#include <stdexcept>
#include <string>

namespace projcred {

// Bad arguments: wrong shapes, non-finite entries, violated preconditions.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A factorization or eigensolver could not produce a usable result.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace projcred
