#pragma once

#include <stdexcept>
#include <string>

namespace lenreward {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric input outside its mathematical domain (e.g. a pass ratio above 1).
struct DomainError : Error {
    using Error::Error;
};

/// A group or batch too small for the requested statistic.
struct DegenerateInputError : Error {
    using Error::Error;
};

/// A verification task with an empty side. Distinct from "incorrect".
struct MalformedTaskError : Error {
    using Error::Error;
};

/// Line-oriented input that failed to parse. `line` is 1-based.
struct ParseError : Error {
    ParseError(int line_no, const std::string& message)
        : Error("line " + std::to_string(line_no) + ": " + message), line(line_no) {}

    int line;
};

/// An invalid configuration value. `field_path` names the offending field.
struct ConfigError : Error {
    ConfigError(std::string path, const std::string& message)
        : Error(path + ": " + message), field_path(std::move(path)) {}

    std::string field_path;
};

}  // namespace lenreward
