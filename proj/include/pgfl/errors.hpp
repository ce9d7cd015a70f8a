#pragma once

#include <stdexcept>
#include <string>

namespace pgfl {

/// Base class for the structured failures raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two operands live on different finite spaces.
class SpaceMismatch : public Error {
public:
    using Error::Error;
};

/// The measurement set has zero likelihood under the model.
class ZeroEvidence : public Error {
public:
    using Error::Error;
};

/// Probability mass dropped by cardinality truncation exceeded the tolerance.
class TruncationOverflow : public Error {
public:
    TruncationOverflow(const std::string& what, double dropped)
        : Error(what), dropped_(dropped) {}

    [[nodiscard]] double dropped() const { return dropped_; }

private:
    double dropped_;
};

/// Invalid scenario configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pgfl
