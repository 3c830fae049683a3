#pragma once

#include <stdexcept>
#include <string>

namespace dcplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unknown configuration input. Carries the source line when
/// the error originates from a file (0 when it does not).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string key = {})
      : Error(format(message, line, key)), line_(line), key_(std::move(key)) {}

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  static std::string format(const std::string& message, int line, const std::string& key) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "key '" + key + "': ";
    return out + message;
  }

  int line_;
  std::string key_;
};

/// A well-formed request that has no solution (budget below one rack, model
/// that does not fit in device memory, fabric beyond supported tiers...).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcplan
