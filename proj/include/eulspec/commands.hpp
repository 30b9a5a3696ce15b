#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "eulspec/config.hpp"

namespace eulspec {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumeric = 2,
  kExitIo = 3,
};

/// Generates the initial field, classifies it, integrates with diagnostics
/// observers and writes timeseries.csv, summary.json and snapshots into
/// cfg.output_dir.
int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Prints a JSON report for a snapshot sequence: one record and identity
/// verdicts per snapshot; identity residuals over time for >= 5 uniformly
/// spaced snapshots.
int cmd_diagnose(const std::vector<std::filesystem::path>& snapshots, std::ostream& out, std::ostream& err);

/// Classifies the initial field described by a run config.
int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Classifies a velocity snapshot or a spectra file (detected by magic).
int cmd_classify(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

}  // namespace eulspec
