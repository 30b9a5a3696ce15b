#include "eulspec/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>

#include "eulspec/errors.hpp"

namespace eulspec {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(path + "." + key, "unknown key");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

double get_number(const json& obj, const char* key, const std::string& path, std::optional<double> fallback) {
  const std::string p = path + "." + key;
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(p, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) fail(p, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(p, "expected a finite number");
  return d;
}

std::int64_t get_integer(const json& obj, const char* key, const std::string& path,
                         std::optional<std::int64_t> fallback) {
  const std::string p = path + "." + key;
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(p, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(p, "expected an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& path,
                       std::optional<std::string> fallback) {
  const std::string p = path + "." + key;
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(p, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) fail(p, "expected a string");
  return v.get<std::string>();
}

InitSpec parse_init(const json& j) {
  const std::string path = "$.init";
  require_object(j, path);
  const std::string kind = get_string(j, "kind", path, std::nullopt);
  if (kind == "taylor_green") {
    reject_unknown(j, path, {"kind"});
    return TaylorGreenInit{};
  }
  if (kind == "abc") {
    reject_unknown(j, path, {"kind", "A", "B", "C"});
    return AbcInit{get_number(j, "A", path, 1.0), get_number(j, "B", path, 1.0), get_number(j, "C", path, 1.0)};
  }
  if (kind == "random_solenoidal") {
    reject_unknown(j, path, {"kind", "seed", "peak_k", "slope", "amplitude"});
    const std::int64_t seed = get_integer(j, "seed", path, std::nullopt);
    if (seed < 0) fail(path + ".seed", "must be non-negative");
    RandomSolenoidalInit r;
    r.seed = static_cast<std::uint64_t>(seed);
    r.peak_k = get_number(j, "peak_k", path, 4.0);
    r.slope = get_number(j, "slope", path, 4.0);
    r.amplitude = get_number(j, "amplitude", path, 1.0);
    if (!(r.peak_k > 0.0)) fail(path + ".peak_k", "must be positive");
    if (!(r.amplitude > 0.0)) fail(path + ".amplitude", "must be positive");
    return r;
  }
  if (kind == "from_file") {
    reject_unknown(j, path, {"kind", "path"});
    return FromFileInit{get_string(j, "path", path, std::nullopt)};
  }
  fail(path + ".kind", "unknown init kind '" + kind + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("$", std::string("invalid JSON: ") + e.what());
  }
  require_object(doc, "$");
  reject_unknown(doc, "$",
                 {"n", "box_length", "init", "solver", "output_dir", "output_every", "snapshot_every",
                  "class_tolerance"});

  RunConfig cfg;
  const std::int64_t n = get_integer(doc, "n", "$", std::nullopt);
  if (n < 8 || n > 128 || (n & (n - 1)) != 0) fail("$.n", "must be a power of two in [8, 128], got " + std::to_string(n));
  cfg.n = static_cast<int>(n);
  cfg.box_length = get_number(doc, "box_length", "$", kTwoPi);
  if (!(cfg.box_length > 0.0)) fail("$.box_length", "must be positive");

  if (!doc.contains("init")) fail("$.init", "missing required key");
  cfg.init = parse_init(doc.at("init"));

  if (doc.contains("solver")) {
    const json& s = require_object(doc.at("solver"), "$.solver");
    reject_unknown(s, "$.solver", {"dt", "t_final", "nu", "dealias", "cfl_warn"});
    cfg.solver.dt = get_number(s, "dt", "$.solver", 1e-3);
    cfg.solver.t_final = get_number(s, "t_final", "$.solver", 1.0);
    cfg.solver.nu = get_number(s, "nu", "$.solver", 0.0);
    cfg.solver.dealias = get_bool(s, "dealias", "$.solver", true);
    cfg.solver.cfl_warn = get_number(s, "cfl_warn", "$.solver", 1.0);
  }
  if (!(cfg.solver.dt > 0.0)) fail("$.solver.dt", "must be positive");
  if (!(cfg.solver.t_final > 0.0)) fail("$.solver.t_final", "must be positive");
  if (!(cfg.solver.nu >= 0.0)) fail("$.solver.nu", "must be non-negative");
  if (!(cfg.solver.cfl_warn > 0.0)) fail("$.solver.cfl_warn", "must be positive");

  cfg.output_dir = get_string(doc, "output_dir", "$", std::string("output"));
  cfg.output_every = get_integer(doc, "output_every", "$", 10);
  if (cfg.output_every < 1) fail("$.output_every", "must be >= 1");
  cfg.snapshot_every = get_integer(doc, "snapshot_every", "$", 0);
  if (cfg.snapshot_every < 0) fail("$.snapshot_every", "must be >= 0");

  if (doc.contains("class_tolerance") && !doc.at("class_tolerance").is_null()) {
    const double tol = get_number(doc, "class_tolerance", "$", std::nullopt);
    if (tol < 0.0) fail("$.class_tolerance", "must be non-negative");
    cfg.class_tolerance = tol;
  }
  if (const auto* r = std::get_if<RandomSolenoidalInit>(&cfg.init); r && !(3.0 * r->peak_k < cfg.n)) {
    fail("$.init.peak_k", "must be below n/3");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace eulspec
