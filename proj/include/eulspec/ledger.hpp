#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "eulspec/diagnostics.hpp"

namespace eulspec {

/// Shortest decimal that round-trips to the same double; "nan", "inf", "-inf".
std::string format_double(double x);

/// Time-series CSV: one DiagnosticsRecord per row followed by the envelope
/// columns. Each row is flushed as soon as it is written so an interrupted
/// run leaves a valid prefix.
class TimeseriesWriter {
 public:
  explicit TimeseriesWriter(const std::filesystem::path& path);

  static std::string header();
  static std::string format_row(const DiagnosticsRecord& r, const EnvelopeRow& env);

  void append(const DiagnosticsRecord& r, const EnvelopeRow& env);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace eulspec
