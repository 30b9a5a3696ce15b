#include "eulspec/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <sstream>

#include "eulspec/diagnostics.hpp"
#include "eulspec/errors.hpp"
#include "eulspec/initial_data.hpp"
#include "eulspec/ledger.hpp"
#include "eulspec/log.hpp"

namespace eulspec {
namespace {

using nlohmann::json;

constexpr double kTolZ2Q = 1e-8;
constexpr double kTolW = 1e-7;
constexpr double kTolC3 = 1e-8;
constexpr double kTolGrad = 1e-10;
constexpr double kTolMomentNormalized = 1e-3;
constexpr double kTolMomentAbs = 1e-9;
constexpr double kTolBkm = 1e-6;

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string snapshot_name(std::int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%08lld.bin", static_cast<long long>(step));
  return buf;
}

// Unwraps ObserverFailure to decide between numeric and I/O exit codes.
int classify_nested(const std::exception& e) {
  try {
    std::rethrow_if_nested(e);
  } catch (const IoError&) {
    return kExitIo;
  } catch (const ComputationError&) {
    return kExitNumeric;
  } catch (const NumericAbort&) {
    return kExitNumeric;
  } catch (const std::exception& inner) {
    return classify_nested(inner);
  }
  return kExitIo;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << doc.dump(2) << '\n';
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

json record_json(const DiagnosticsRecord& r) {
  json j = json::object();
  const auto values = record_values(r);
  for (std::size_t i = 0; i < values.size(); ++i) j[kRecordFieldNames[i]] = nullable(values[i]);
  return j;
}

json classification_json(const Classification& c) {
  return json{{"class", to_string(c.cls)},
              {"min_lambda2", c.min_lambda2},
              {"max_lambda2", c.max_lambda2},
              {"tolerance", c.tolerance}};
}

struct RunTrace {
  std::vector<DiagnosticsRecord> records;
  std::vector<EnvelopeRow> envelopes;
  std::optional<double> zero_touching;
  std::size_t class_records = 0;  // records before the first zero touching
  double max_high_mode_fraction = 0.0;
  double final_high_mode_fraction = 0.0;
  std::optional<std::filesystem::path> last_snapshot;
};

json build_summary(const RunConfig& cfg, const Grid& grid, const Classification& cls, const RunTrace& trace,
                   const EulerSolver& solver, const std::optional<SolverState>& final_state) {
  json s;
  s["n"] = cfg.n;
  s["box_length"] = cfg.box_length;
  s["dt"] = cfg.solver.dt;
  s["t_final"] = cfg.solver.t_final;
  s["nu"] = cfg.solver.nu;
  s["dealias"] = cfg.solver.dealias;
  s["class"] = to_string(cls.cls);
  s["classification"] = classification_json(cls);
  s["first_zero_touching_time"] = trace.zero_touching ? json(*trace.zero_touching) : json(nullptr);
  s["records"] = trace.records.size();
  if (final_state) {
    s["steps"] = final_state->step_index;
    s["final_time"] = final_state->t;
  }
  s["max_cfl"] = solver.max_cfl();
  s["cfl_warnings"] = solver.cfl_warnings();
  s["resolution"] = {{"max_high_mode_enstrophy_fraction", trace.max_high_mode_fraction},
                     {"final_high_mode_enstrophy_fraction", trace.final_high_mode_fraction}};

  const auto& recs = trace.records;
  if (recs.empty()) return s;
  const DiagnosticsRecord& r0 = recs.front();
  s["E0"] = r0.E;
  s["H0"] = r0.H;
  s["Z0"] = r0.Z;

  double energy_drift = 0.0, helicity_drift = 0.0;
  const bool helicity_relative = std::abs(r0.H) > 1e-8 * 2.0 * r0.E;
  RecordIdentityResiduals worst;
  for (const auto& r : recs) {
    if (r0.E > 0.0) energy_drift = std::max(energy_drift, std::abs(r.E - r0.E) / r0.E);
    if (helicity_relative) {
      helicity_drift = std::max(helicity_drift, std::abs(r.H - r0.H) / std::abs(r0.H));
    } else if (r0.E > 0.0) {
      helicity_drift = std::max(helicity_drift, std::abs(r.H) / (2.0 * r0.E));
    }
    const auto res = record_identity_residuals(r, grid.volume());
    worst.z_vs_2q = std::max(worst.z_vs_2q, res.z_vs_2q);
    worst.w_vs_c3 = std::max(worst.w_vs_c3, res.w_vs_c3);
    worst.c3_vs_3p = std::max(worst.c3_vs_3p, res.c3_vs_3p);
  }
  s["max_energy_drift"] = energy_drift;
  s["max_helicity_drift"] = helicity_drift;
  s["helicity_drift_kind"] = helicity_relative ? "relative" : "abs_over_2E0";

  json ids;
  ids["z_vs_2q"] = worst.z_vs_2q;
  ids["w_vs_c3"] = worst.w_vs_c3;
  ids["c3_vs_3p"] = worst.c3_vs_3p;
  bool ids_pass = worst.z_vs_2q <= kTolZ2Q && worst.w_vs_c3 <= kTolW && worst.c3_vs_3p <= kTolC3;
  if (recs.size() >= 5) {
    const double h = recs[1].t - recs[0].t;
    const auto moment = moment_identity_residual(recs, h);
    ids["moment_max_abs"] = moment.max_abs;
    ids["moment_max_normalized"] = moment.max_normalized;
    ids["moment_floor"] = moment.floor;
    if (cfg.solver.nu == 0.0) {
      ids_pass = ids_pass && (moment.max_normalized <= kTolMomentNormalized || moment.max_abs <= kTolMomentAbs);
    }
  } else {
    ids["moment_max_abs"] = nullptr;
    ids["moment_max_normalized"] = nullptr;
  }
  ids["verdict"] = ids_pass ? "pass" : "fail";
  s["identity_residuals"] = ids;

  const EnvelopeSeries env = vorticity_envelopes(recs);
  const double slack = envelope_quadrature_slack(recs);
  const ContainmentReport containment = check_envelope_containment(recs, env, slack);
  s["envelope_containment"] = {{"verdict", containment.contained ? "pass" : "fail"},
                               {"quadrature_slack", slack},
                               {"max_lower_excess", containment.max_lower_excess},
                               {"max_upper_excess", containment.max_upper_excess},
                               {"note", "grid extrema stand in for the continuum sup/inf of lambda2"}};
  const ContainmentReport bkm = check_bkm_inequality(recs, env, kTolBkm);
  s["lambda2_integral_bound"] = {{"verdict", bkm.contained ? "pass" : "fail"},
                                  {"max_excess", bkm.max_upper_excess},
                                  {"final_lambda2_plus_integral", env.bkm_lambda_integral.back()}};

  if (cls.cls == AdmissibleClass::Neither) {
    s["class_envelopes"] = {{"verdict", "inapplicable"}, {"reason", "initial data is in neither APlus nor AMinus"}};
    s["eps_decay_bound"] = {{"verdict", "inapplicable"}, {"reason", "initial data is in neither APlus nor AMinus"}};
  } else {
    const std::span<const DiagnosticsRecord> before(recs.data(), trace.class_records);
    if (before.empty()) {
      s["class_envelopes"] = {{"verdict", "inapplicable"}, {"reason", "class violated at the first record"}};
      s["eps_decay_bound"] = {{"verdict", "inapplicable"}, {"reason", "class violated at the first record"}};
    } else {
      const EnvelopeSeries class_env = class_envelopes(before, cls.cls);
      bool class_ok = true;
      for (std::size_t i = 0; i < before.size(); ++i) {
        const double ratio = std::sqrt(before[i].Z / r0.Z);
        class_ok = class_ok && ratio >= class_env.class_lower[i] * (1.0 - slack - 1e-12) &&
                   ratio <= class_env.class_upper[i] * (1.0 + slack + 1e-12);
      }
      s["class_envelopes"] = {{"verdict", class_ok ? "pass" : "fail"}, {"records", before.size()}};
      const EpsDecayCheck c = eps_decay_check(before, cls.cls, r0.E, r0.H, r0.Z, grid.volume());
      if (!c.applicable) {
        s["eps_decay_bound"] = {{"verdict", "inapplicable"}, {"reason", c.reason}};
      } else {
        s["eps_decay_bound"] = {{"verdict", c.all_satisfied ? "pass" : "fail"},
                      {"rhs", c.rhs},
                      {"final_lhs", nullable(c.lhs.back())}};
      }
    }
  }
  return s;
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    err << "error: cannot create output directory '" << cfg.output_dir.string() << "'\n";
    return kExitIo;
  }

  try {
    const Grid grid(cfg.n, cfg.box_length);
    const SpectralVector v0 = make_initial(grid, cfg.init, cfg.solver.dealias);
    const SpectraField spectra0 = eigenvalues_sym3(deformation_tensor(velocity_gradient(v0)));
    const double tol = cfg.class_tolerance.value_or(default_class_tolerance(spectra0));
    const Classification cls = classify_admissible(spectra0, tol);
    log_info("initial class " + to_string(cls.cls));

    TimeseriesWriter writer(cfg.output_dir / "timeseries.csv");
    RunTrace trace;
    const std::optional<AdmissibleClass> eps_class =
        cls.cls == AdmissibleClass::Neither ? std::nullopt : std::optional<AdmissibleClass>(cls.cls);
    EnvelopeTracker tracker(eps_class);

    std::vector<Observer> observers;
    observers.push_back({cfg.output_every, [&](const SolverState& s) {
                           DiagnosticsRecord r = compute_record(s.v, s.t, eps_class);
                           if (eps_class && !trace.zero_touching) {
                             const Lambda2Sample sample{r.t, r.min_l2, r.max_l2};
                             trace.zero_touching = first_zero_touching(std::span(&sample, 1), cls, tol);
                             if (trace.zero_touching) {
                               tracker.stop_class_envelopes();
                             } else {
                               ++trace.class_records;
                             }
                           }
                           const EnvelopeRow row = tracker.push(r);
                           writer.append(r, row);
                           trace.records.push_back(r);
                           trace.envelopes.push_back(row);
                           const double frac = high_mode_enstrophy_fraction(s.v);
                           trace.max_high_mode_fraction = std::max(trace.max_high_mode_fraction, frac);
                           trace.final_high_mode_fraction = frac;
                         }});
    if (cfg.snapshot_every > 0) {
      observers.push_back({cfg.snapshot_every, [&](const SolverState& s) {
                             const fs::path p = cfg.output_dir / snapshot_name(s.step_index);
                             write_snapshot(p, fft_inverse(s.v), s.t);
                             trace.last_snapshot = p;
                           }});
    }

    EulerSolver solver(grid, cfg.solver);
    std::optional<SolverState> final_state;
    int code = kExitOk;
    json abort_info = nullptr;
    try {
      final_state = solver.run(SolverState{0.0, v0, 0}, observers);
    } catch (const NumericAbort& e) {
      code = kExitNumeric;
      abort_info = {{"step", e.step()}, {"message", e.what()}};
      if (e.last_good()) abort_info["last_good_time"] = e.last_good()->t;
      abort_info["last_snapshot"] = trace.last_snapshot ? json(trace.last_snapshot->string()) : json(nullptr);
      err << "numeric abort at step " << e.step() << ": " << e.what() << '\n';
    } catch (const ObserverFailure& e) {
      code = classify_nested(e);
      abort_info = {{"step", e.step()}, {"message", e.what()}};
      err << "error: " << e.what() << '\n';
      if (code == kExitIo) return code;
    }

    json summary = build_summary(cfg, grid, cls, trace, solver, final_state);
    summary["status"] = code == kExitOk ? "completed" : "aborted";
    summary["abort"] = abort_info;
    write_json_file(cfg.output_dir / "summary.json", summary);
    if (!quiet()) {
      out << "class: " << to_string(cls.cls) << "\n";
      out << "records: " << trace.records.size() << "\n";
      out << "summary: " << (cfg.output_dir / "summary.json").string() << "\n";
    }
    return code;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int cmd_diagnose(const std::vector<std::filesystem::path>& paths, std::ostream& out, std::ostream& err) {
  if (paths.empty()) {
    err << "error: diagnose needs at least one snapshot\n";
    return kExitUsage;
  }
  try {
    std::vector<Snapshot> snaps;
    for (const auto& p : paths) snaps.push_back(load_snapshot(p));
    const Grid grid = snaps.front().v.grid();
    for (std::size_t i = 1; i < snaps.size(); ++i) {
      if (!(snaps[i].v.grid() == grid)) {
        throw ContractViolation("snapshot '" + paths[i].string() + "' has n=" + std::to_string(snaps[i].v.grid().n()) +
                                ", sequence started with n=" + std::to_string(grid.n()));
      }
    }

    json report;
    report["n"] = grid.n();
    report["box_length"] = grid.box_length();
    json entries = json::array();
    std::vector<SpectralVector> fields;
    std::vector<DiagnosticsRecord> records;
    std::vector<double> times;
    bool all_pass = true;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      SpectralVector v = fft_forward(snaps[i].v);
      const FieldAnalysis a = analyze(v);
      const DiagnosticsRecord r = compute_record(a, snaps[i].t);
      const auto res = record_identity_residuals(r, grid.volume());
      const double grad = gradient_norm_integral(a.grad);
      const double grad_rel = std::abs(grad - r.Z) / std::max({std::abs(grad), std::abs(r.Z), 1e-300});
      const bool pass = res.z_vs_2q <= kTolZ2Q && res.w_vs_c3 <= kTolW && res.c3_vs_3p <= kTolC3 &&
                        (r.Z == 0.0 || grad_rel <= kTolGrad);
      all_pass = all_pass && pass;
      json verdicts = {{"z_eq_2q", {{"residual", res.z_vs_2q}, {"pass", res.z_vs_2q <= kTolZ2Q}}},
                       {"w_eq_minus_4_3_c3", {{"residual", res.w_vs_c3}, {"pass", res.w_vs_c3 <= kTolW}}},
                       {"c3_eq_3p", {{"residual", res.c3_vs_3p}, {"pass", res.c3_vs_3p <= kTolC3}}},
                       {"grad_norm_eq_enstrophy", {{"residual", grad_rel}, {"pass", r.Z == 0.0 || grad_rel <= kTolGrad}}},
                       {"divergence_ratio", divergence_ratio(v)}};
      entries.push_back({{"path", paths[i].string()}, {"record", record_json(r)}, {"identities", verdicts}});
      fields.push_back(std::move(v));
      records.push_back(r);
      times.push_back(snaps[i].t);
    }
    report["snapshots"] = entries;

    if (snaps.size() >= 5) {
      bool uniform = true;
      double h = 0.0;
      try {
        h = uniform_spacing(times);
      } catch (const ContractViolation&) {
        uniform = false;
      }
      if (!uniform) {
        report["time_residuals"] = {{"skipped", "snapshot times are not uniformly spaced"}};
      } else {
        const auto moment = moment_identity_residual(records, h);
        json moment_json = {{"t", moment.t},
                          {"residual", moment.residual},
                          {"normalized", moment.normalized},
                          {"max_abs", moment.max_abs},
                          {"max_normalized", moment.max_normalized}};
        const bool moment_pass = moment.max_normalized <= kTolMomentNormalized || moment.max_abs <= kTolMomentAbs;
        moment_json["pass"] = moment_pass;
        json vort = json::array();
        for (const auto& [t, res] : vorticity_equation_residuals(fields, times)) {
          vort.push_back({{"t", t}, {"residual_l2", res.residual_l2}, {"dwdt_l2", res.dwdt_l2}});
        }
        report["time_residuals"] = {{"moment_identity", moment_json}, {"vorticity_equation", vort}};
      }
    }
    report["verdict"] = all_pass ? "pass" : "fail";
    out << report.dump(2) << '\n';
    return kExitOk;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

namespace {

void print_classification(const Classification& c, std::ostream& out) {
  out << "class: " << to_string(c.cls) << '\n';
  out << "min_lambda2: " << format_double(c.min_lambda2) << '\n';
  out << "max_lambda2: " << format_double(c.max_lambda2) << '\n';
  out << "tolerance: " << format_double(c.tolerance) << '\n';
}

}  // namespace

int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Grid grid(cfg.n, cfg.box_length);
    const SpectralVector v = make_initial(grid, cfg.init, cfg.solver.dealias);
    print_classification(classify_initial(v, cfg.class_tolerance.value_or(-1.0)), out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int cmd_classify(const std::filesystem::path& file, std::ostream& out, std::ostream& err) {
  try {
    const std::string magic = peek_magic(file);
    if (magic == std::string(kSpectraMagic, 8)) {
      const SpectraField s = load_spectra_file(file);
      print_classification(classify_admissible(s, default_class_tolerance(s)), out);
    } else {
      const Snapshot snap = load_snapshot(file);
      print_classification(classify_initial(fft_forward(snap.v)), out);
    }
    return kExitOk;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace eulspec
