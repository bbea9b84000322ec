#pragma once

#include <stdexcept>
#include <string>

namespace crsig {

/// Bad configuration input: unknown algorithm ids, malformed config or
/// scenario files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (zero inputs, negative sizes...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Structurally invalid protocol objects (bad lengths, unknown tags).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace crsig
