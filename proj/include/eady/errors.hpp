#pragma once

#include <stdexcept>
#include <string>

namespace eady {

/// Invalid configuration value. `key()` names the offending config key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)), detail_(what) {}
  /// Error located in a config file; the message starts with "source:line: ".
  ConfigError(std::string key, const std::string& what, const std::string& source, int line)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " +
                           (key.empty() ? what : key + ": " + what)),
        key_(std::move(key)),
        detail_(what),
        line_(line) {}
  const std::string& key() const noexcept { return key_; }
  /// 1-based line in the config file, or 0 when not from a file.
  int line() const noexcept { return line_; }
  /// Message without the key or location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string key_;
  std::string detail_;
  int line_ = 0;
};

/// Non-physical thermodynamic input (non-positive density or temperature).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative solver failure (hydrostatic Newton, implicit step, breeding).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File I/O or format failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eady
