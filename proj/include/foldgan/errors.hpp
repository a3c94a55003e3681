#pragma once

#include <stdexcept>

namespace foldgan {

/// Violated precondition or type invariant in the data model.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace foldgan
