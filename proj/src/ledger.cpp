#include "eulspec/ledger.hpp"

#include <charconv>
#include <cmath>

#include "eulspec/errors.hpp"

namespace eulspec {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

TimeseriesWriter::TimeseriesWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  out_ << header() << '\n';
  out_.flush();
  if (!out_) throw IoError("write to '" + path_.string() + "' failed");
}

std::string TimeseriesWriter::header() {
  std::string h;
  for (const char* name : kRecordFieldNames) {
    if (!h.empty()) h += ',';
    h += name;
  }
  h += ",env_lower,env_upper,class_env_lower,class_env_upper,bkm_lambda_integral";
  return h;
}

std::string TimeseriesWriter::format_row(const DiagnosticsRecord& r, const EnvelopeRow& env) {
  std::string row;
  for (double v : record_values(r)) {
    if (!row.empty()) row += ',';
    row += format_double(v);
  }
  for (double v : {env.lower, env.upper, env.class_lower, env.class_upper, env.bkm_lambda_integral}) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

void TimeseriesWriter::append(const DiagnosticsRecord& r, const EnvelopeRow& env) {
  out_ << format_row(r, env) << '\n';
  out_.flush();
  if (!out_) throw IoError("write to '" + path_.string() + "' failed");
}

}  // namespace eulspec
