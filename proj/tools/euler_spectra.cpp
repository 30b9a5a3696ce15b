#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "eulspec/commands.hpp"
#include "eulspec/errors.hpp"
#include "eulspec/field.hpp"
#include "eulspec/log.hpp"

namespace {

int threads_from_env() {
  const char* env = std::getenv("EULER_SPECTRA_THREADS");
  const int fallback = std::max(1u, std::thread::hardware_concurrency());
  if (env == nullptr || *env == '\0') return fallback;
  try {
    const int n = std::stoi(env);
    if (n >= 1) return n;
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring EULER_SPECTRA_THREADS='" << env << "'\n";
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral Euler solver with deformation-spectra diagnostics"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "integrate a configured run and write diagnostics");
  run->add_option("--config", config_path, "run configuration (JSON)")->required();
  run->add_option("--output-dir", output_dir, "override output_dir from the config");
  run->add_flag("--quiet", quiet, "suppress progress output");

  std::vector<std::string> snapshots;
  auto* diagnose = app.add_subcommand("diagnose", "analyze stored snapshots");
  diagnose->add_option("snapshots", snapshots, "snapshot files")->required();

  std::string classify_config, classify_file;
  auto* classify = app.add_subcommand("classify", "classify initial data");
  auto* cfg_opt = classify->add_option("--config", classify_config, "run configuration (JSON)");
  auto* file_opt = classify->add_option("file", classify_file, "velocity snapshot or spectra file");
  cfg_opt->excludes(file_opt);
  file_opt->excludes(cfg_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return eulspec::kExitUsage;
  }

  eulspec::set_thread_count(threads_from_env());
  eulspec::set_quiet(quiet);

  try {
    if (*run) {
      eulspec::RunConfig cfg = eulspec::load_config(config_path);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      return eulspec::cmd_run(cfg, std::cout, std::cerr);
    }
    if (*diagnose) {
      std::vector<std::filesystem::path> paths(snapshots.begin(), snapshots.end());
      return eulspec::cmd_diagnose(paths, std::cout, std::cerr);
    }
    if (!classify_config.empty()) {
      return eulspec::cmd_classify(eulspec::load_config(classify_config), std::cout, std::cerr);
    }
    if (!classify_file.empty()) return eulspec::cmd_classify(classify_file, std::cout, std::cerr);
    std::cerr << "error: classify needs --config <path> or a snapshot path\n";
    return eulspec::kExitUsage;
  } catch (const eulspec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return eulspec::kExitUsage;
  } catch (const eulspec::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return eulspec::kExitIo;
  } catch (const eulspec::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return eulspec::kExitUsage;
  }
}
