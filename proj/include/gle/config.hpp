#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gle/history.hpp"
#include "gle/kernel.hpp"
#include "gle/potential.hpp"

namespace gle {

// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Flat, canonicalized experiment configuration: `key = value` lines with JSON
// fragment values.  Keys are kept sorted, so the serialization and hash are
// independent of input order.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  const nlohmann::json* raw(const std::string& key) const;
  void set(const std::string& key, nlohmann::json value);

  std::string serialize() const;
  // FNV-1a digest of the canonical serialization, as 16 hex chars.
  std::string hash() const;

  SumExpKernel kernel() const;
  Potential potential() const;
  InitialPast initial_past(const std::string& key) const;

  bool operator==(const ExperimentConfig& other) const { return values_ == other.values_; }

 private:
  void validate() const;  // throws ConfigError listing every violation
  std::map<std::string, nlohmann::json> values_;
};

// Past with x(r) = coeff (1 + |r|^rho); the grid covers [grid_start, 0] so
// the velocity stays finite at the origin row.
InitialPast power_growth_past(double coeff, double rho, double grid_start = -1.0,
                              double dt = 0.01);

InitialPast parse_initial_past(const nlohmann::json& spec);
nlohmann::json initial_past_to_json(const InitialPast& past);

}  // namespace gle
