#pragma once

#include <stdexcept>
#include <string>

namespace tspec {

// Malformed or insufficient input data (bad CSV rows, too-short timelines,
// degenerate label sets). The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or argument combination. Exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace tspec
