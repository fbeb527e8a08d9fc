#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "vsheet/cli_io.hpp"
#include "vsheet/parallel.hpp"

namespace {

int report_config_errors(const vsheet::ConfigParse& parsed) {
  std::cerr << "invalid configuration:\n";
  for (const auto& e : parsed.errors) std::cerr << "  - " << e << '\n';
  return vsheet::kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytic vortex-sheet and Muskat interface solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "solve and write artifacts");
  run->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (default: output.dir from the config)");

  auto* ops = app.add_subcommand("validate-operators", "seeded operator inequality and backend suites");
  ops->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);

  auto* cmp = app.add_subcommand("compare-oracle", "Picard solution against the RK4 oracle");
  cmp->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vsheet::kExitError;
  }

  vsheet::configure_threads_from_env();
  const auto parsed = vsheet::load_config(config_path);
  if (!parsed.ok()) return report_config_errors(parsed);
  const auto& config = *parsed.config;

  try {
    if (*run) {
      const std::filesystem::path dir = out_dir.empty() ? config.output_dir : out_dir;
      if (dir.empty()) {
        std::cerr << "no output directory: pass --out or set output.dir\n";
        return vsheet::kExitError;
      }
      const auto outcome = vsheet::run(config, dir);
      (outcome.exit_code == vsheet::kExitOk ? std::cout : std::cerr) << outcome.message << '\n';
      for (const auto& p : outcome.written) std::cout << "wrote " << p.string() << '\n';
      return outcome.exit_code;
    }
    const auto report = *ops ? vsheet::validate_operators(config) : vsheet::compare_oracle(config);
    std::cout << vsheet::dump(report.body);
    return report.pass ? vsheet::kExitOk : vsheet::kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return vsheet::kExitError;
  }
}
