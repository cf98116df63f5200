#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace waist {

inline constexpr const char* kVersion = "waist 0.1.0";

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Command { bound, modulus, verify_waist, verify_iso, needle_suite, compare };
enum class OutputFormat { json, csv };

std::string to_string(Command c);
Command parse_command(const std::string& text);
std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& text);

/// `lo:hi:step`, inclusive of hi up to rounding.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  static GridSpec parse(const std::string& text);
  std::string to_string() const;
  std::vector<double> values() const;
};

struct ExperimentConfig {
  Command command = Command::bound;
  std::string norm;  ///< empty: Euclidean of dimension n + 1
  int n = 0;  ///< 0: taken from the norm
  int k = 1;
  std::optional<double> eps;
  std::optional<GridSpec> eps_grid;
  std::uint64_t samples = 1'000'000;
  std::uint64_t fiber_points = 10'000;  ///< 0: max(1e4, 100 / eps^k)
  GridSpec z_grid{-0.8, 0.8, 0.2};
  std::uint64_t seed = 0;
  std::string f_upper = "pi";
  std::string modulus = "analytic";  ///< or "numeric"
  std::uint64_t modulus_budget = 20'000;
  double cap_mass = 0.5;
  std::uint64_t trials = 10'000;
  std::string out;  ///< empty: stdout
  OutputFormat format = OutputFormat::json;

  /// Fills defaults that depend on other fields and checks every range.
  /// Throws ConfigError.
  void validate();
  std::vector<double> eps_values() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct Report {
  nlohmann::json json;  ///< single object: version, command, config, results
  std::string csv;
  bool passed = true;
};

Report run_experiment(ExperimentConfig config);

std::string render(const Report& report, OutputFormat format);

/// Writes the rendered report; throws std::runtime_error on I/O failure.
void emit_report(const Report& report, const std::string& path, OutputFormat format);

}  // namespace waist
