#pragma once

#include <stdexcept>
#include <string>

namespace isospec {

/// Base class for every error raised by the library.  Messages are meant to
/// be shown to a user verbatim (the CLI prints `what()` and exits with 2).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArithmeticError : public Error {
public:
    using Error::Error;
};

class PrecisionError : public Error {
public:
    explicit PrecisionError(const std::string& what) : Error("insufficient precision: " + what) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace isospec
