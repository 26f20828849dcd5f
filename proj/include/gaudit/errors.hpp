#pragma once

#include <stdexcept>
#include <string>

namespace gaudit {

/// Malformed input data or schema (bad CSV, unknown column, invalid values).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file or option problems.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few usable rows for the requested statistic.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model family asked to do something it does not support.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gaudit
