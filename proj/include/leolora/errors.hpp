#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace leolora {

/// A parameter or configuration value outside its admissible range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The caller broke a documented precondition (e.g. harvest during eclipse).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Scenario validation failure carrying every offending path, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& issue : issues) {
      if (!out.empty()) out += '\n';
      out += issue;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace leolora
