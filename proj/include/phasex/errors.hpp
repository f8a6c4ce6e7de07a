#pragma once

#include <stdexcept>
#include <string>

namespace phasex {

/// Base class for all errors raised by the framework.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (bad config file, bad catalog, bad plan).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// External tool could not be driven (spawn failures, missing sources, broken templates).
class ToolchainError : public Error {
public:
    using Error::Error;
};

/// Measurement provider unusable or a counter read failed.
class ProviderError : public Error {
public:
    using Error::Error;
};

/// Selection requested over a population with no valid records.
class EmptySelectionError : public Error {
public:
    using Error::Error;
};

} // namespace phasex
