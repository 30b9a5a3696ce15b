#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "eulspec/initial_data.hpp"
#include "eulspec/solver.hpp"

namespace eulspec {

/// A run document. JSON schema (unknown keys are rejected at every level):
///
///   {
///     "n": 32,                          required, power of two in [8, 128]
///     "box_length": 6.283185307179586,  optional, default 2 pi
///     "init": {"kind": "taylor_green"}  required; other kinds:
///             {"kind": "abc", "A": 1, "B": 1, "C": 1}
///             {"kind": "random_solenoidal", "seed": 7, "peak_k": 4, "slope": 4, "amplitude": 1}
///             {"kind": "from_file", "path": "snap.bin"}
///     "solver": {"dt": 1e-3, "t_final": 1.0, "nu": 0.0, "dealias": true, "cfl_warn": 1.0},
///     "output_dir": "output",
///     "output_every": 10,
///     "snapshot_every": 0,
///     "class_tolerance": null           null or absent: 1e-10 * RMS(lambda1)
///   }
struct RunConfig {
  int n = 32;
  double box_length = kTwoPi;
  InitSpec init = TaylorGreenInit{};
  SolverConfig solver;
  std::filesystem::path output_dir = "output";
  std::int64_t output_every = 10;
  std::int64_t snapshot_every = 0;
  std::optional<double> class_tolerance;
};

/// Parses and validates a run document. Throws ConfigError whose message
/// starts with the JSON path of the offending value (e.g. "$.solver.dt").
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace eulspec
