// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_ERRORS_HPP
#define TRUSTTOKEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace trusttoken {

/// Base class for all library errors. The CLI maps subclasses onto its
/// documented exit codes (validation -> 2, I/O -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid PufConfig or a challenge outside the configured width.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mismatched widths or a device evaluated under the wrong config.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A statistic was requested over too few samples.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Duplicate or dangling identifiers while building a fabric.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// A transaction or integrity change addressed a core that does not exist.
/// Distinct from an authorization denial.
class RoutingError : public Error {
 public:
  using Error::Error;
};

/// The challenge space cannot yield enough distinct tokens.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A config document, scenario selection, or report input failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace trusttoken

#endif  // TRUSTTOKEN_ERRORS_HPP
