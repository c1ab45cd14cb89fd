#pragma once

#include <stdexcept>
#include <string>

namespace qtrans {

// Invalid physical or configuration input.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not reach its stated accuracy or hit a
// singular point.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range job configuration (unknown keys, bad values).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qtrans
