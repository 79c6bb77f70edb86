#pragma once

#include <stdexcept>
#include <string>

namespace grace {

// Error taxonomy mirrored by the CLI exit codes: input errors come from bad
// data files or malformed values (exit 2), config errors from invalid
// parameter combinations (exit 3), numeric errors from failed computations
// (exit 4).
enum class ErrorKind { Input, Config, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace grace
