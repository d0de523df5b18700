#pragma once

#include <stdexcept>
#include <string>

namespace l2b {

/// Invalid configuration value; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called in a state that does not allow it.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Unreadable, corrupted, or mismatched checkpoint file.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace l2b
