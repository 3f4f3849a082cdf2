#pragma once

#include <stdexcept>
#include <string>

namespace trustcal {

// Precondition or invariant violation in a domain operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent configuration (catalogs, presets, schedules).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad command-line or format selection.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace trustcal
