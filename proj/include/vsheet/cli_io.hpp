#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsheet/fixed_point.hpp"
#include "vsheet/muskat.hpp"

namespace vsheet {

enum class Problem { VortexSheet, Muskat };

struct OracleSettings {
  double dt = 1e-3;
  std::optional<double> horizon;    // default: min(1, T) (vortex local), 0.5 (vortex global), 1 (Muskat)
  std::optional<double> threshold;  // default: 1e-4 local, 1e-5 global, 1e-6 Muskat
};

struct OperatorSuiteSettings {
  int cases = 20;
  std::uint64_t seed = 20240601;
  std::vector<double> rho = {0.0, 0.05, 0.1};
  int n_modes = 64;
  double amplitude = 0.1;
  int probe_j = 0;  // > 0: also apply T_j at this order to exercise the capacity guard
};

struct RunConfig {
  Problem problem = Problem::VortexSheet;
  SolverConfig vortex;
  MuskatConfig muskat;
  std::string output_dir;
  std::set<std::string> emit = {"solution_csv", "diagnostics_json", "norms_csv", "plotdata_csv"};
  OracleSettings oracle;
  OperatorSuiteSettings operators;
};

struct ConfigParse {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // every problem found, syntax errors carry line/column
  bool ok() const { return config.has_value(); }
};

ConfigParse parse_config(const std::string& text);
ConfigParse load_config(const std::filesystem::path& path);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDivergence = 2;

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::filesystem::path> written;
};

// Solves and writes the requested artifacts. Nothing is written on error;
// on divergence only the diagnostics and summary are written.
RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir);

struct Report {
  nlohmann::json body;
  bool pass = true;
};

// Seeded operator property suites with measured margins.
Report validate_operators(const RunConfig& config);

// Picard solution against the RK4 oracle over the configured horizon.
Report compare_oracle(const RunConfig& config);

// JSON text with a trailing newline; numbers printed round-trip exact.
std::string dump(const nlohmann::json& j);

}  // namespace vsheet
