#pragma once

#include <stdexcept>
#include <string>

namespace wgfocus {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid specification, configuration key, or argument outside an
/// operation's domain. The CLI maps this to exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A frequency below the waveguide cutoff was passed where only propagating
/// modes are meaningful.
class EvanescentFrequencyError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Numerical failure: truncated spectra, pulses walking off the time window,
/// aliasing, integrator breakdown. The CLI maps this to exit status 3.
class NumericError : public Error {
public:
    using Error::Error;
};

/// The pulse touches the edges of its time window (wrap-around risk).
class WindowingError : public NumericError {
public:
    using NumericError::NumericError;
};

/// File-system or format error. The CLI maps this to exit status 4.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace wgfocus
