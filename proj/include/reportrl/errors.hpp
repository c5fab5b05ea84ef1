#pragma once

#include <stdexcept>
#include <string>

namespace reportrl {

// Invalid configuration values (weights, rates, group sizes, bad config files).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed data on ingestion (wrong vector length, unknown label string, bad JSON).
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite math is required; aborts the optimizer step.
class NumericalFault : public std::runtime_error {
 public:
  explicit NumericalFault(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace reportrl
