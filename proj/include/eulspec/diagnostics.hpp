#pragma once

// Per-step integrals of the velocity, vorticity and deformation spectra, the
// exact identities they obey, and the a priori vorticity envelopes built on
// the extrema of the middle eigenvalue.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eulspec/deformation.hpp"
#include "eulspec/field.hpp"

namespace eulspec {

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;   // 1/2 int |v|^2
  double H = 0.0;   // int v . w
  double Z = 0.0;   // int |w|^2
  double Q = 0.0;   // int (l1^2 + l2^2 + l3^2)
  double P = 0.0;   // int l1 l2 l3
  double W = 0.0;   // int S_jk w_j w_k
  double C3 = 0.0;  // int tr(S^3)
  double sup_l2p = 0.0;
  double inf_l2p = 0.0;
  double sup_l2m_abs = 0.0;
  double inf_l2m_abs = 0.0;
  double min_l2 = 0.0;
  double max_l2 = 0.0;
  double inf_eps = 0.0;  // NaN unless the run is in APlus/AMinus
  double bkm_sup_vort = 0.0;
};

inline constexpr std::array<const char*, 16> kRecordFieldNames = {
    "t",       "E",           "H",           "Z",      "Q",      "P",       "W",      "C3",
    "sup_l2p", "inf_l2p",     "sup_l2m_abs", "inf_l2m_abs", "min_l2", "max_l2", "inf_eps", "bkm_sup_vort"};

std::array<double, 16> record_values(const DiagnosticsRecord& r);

double energy(const PhysicalVector& v);
double helicity(const PhysicalVector& v, const PhysicalVector& w);
double enstrophy(const PhysicalVector& w);

struct SpectraIntegrals {
  double Q = 0.0;
  double P = 0.0;
};
SpectraIntegrals spectra_integrals(const SpectraField& spectra);

double stretching_integral(const SymTensorField& S, const PhysicalVector& w);
double cubic_trace_integral(const SymTensorField& S);
/// int |grad v|^2 = int sum_ij V_ij^2.
double gradient_norm_integral(const VelocityGradient& V);

/// Integrals in the eps parameterization on APlus/AMinus:
/// Y = int lambda^2 (eps^2 + eps + 1), X = int lambda^3 (eps^2 + eps).
struct EpsFormIntegrals {
  double Y = 0.0;
  double X = 0.0;
};
EpsFormIntegrals eps_form_integrals(const SpectraField& spectra, AdmissibleClass cls);

/// Every field the record needs, computed once from a spectral velocity.
struct FieldAnalysis {
  PhysicalVector v;
  PhysicalVector w;
  VelocityGradient grad;
  SymTensorField S;
  SpectraField spectra;
};
FieldAnalysis analyze(const SpectralVector& v);

/// eps_class selects the eps denominator; eps_floor < 0 uses the default floor.
DiagnosticsRecord compute_record(const FieldAnalysis& a, double t,
                                 std::optional<AdmissibleClass> eps_class = std::nullopt, double eps_floor = -1.0);
DiagnosticsRecord compute_record(const SpectralVector& v, double t,
                                 std::optional<AdmissibleClass> eps_class = std::nullopt, double eps_floor = -1.0);

/// Relative residuals of the record-level identities Z = 2Q, W = -4/3 C3 and
/// C3 = 3P. Denominators are max(|lhs|, |rhs|, natural scale), with Z for the
/// quadratic identity and Z^{3/2} / |Omega|^{1/2} for the cubic ones.
struct RecordIdentityResiduals {
  double z_vs_2q = 0.0;
  double w_vs_c3 = 0.0;
  double c3_vs_3p = 0.0;
};
RecordIdentityResiduals record_identity_residuals(const DiagnosticsRecord& r, double volume);

/// Fourth-order finite-difference derivative of uniformly sampled data:
/// centered five-point stencil inside, one-sided five-point stencils at the
/// two points nearest each end. Needs at least 5 samples.
std::vector<double> fd_derivative_4th(std::span<const double> f, double h);

inline constexpr double kDefaultIdentityFloor = 1e-2;

struct MomentIdentityResidual {
  std::vector<double> t;
  std::vector<double> dq;          // D[Q]
  std::vector<double> residual;    // D[Q] + 4P
  std::vector<double> normalized;  // |residual| / max(|D[Q]|, 4|P|, floor)
  double floor = 0.0;
  double max_abs = 0.0;
  double max_normalized = 0.0;
};

/// Residual of dQ/dt = -4P along a uniformly spaced record series.
/// floor_rel scales the normalization floor: floor = floor_rel * max_t max(|D[Q]|, 4|P|).
MomentIdentityResidual moment_identity_residual(std::span<const DiagnosticsRecord> series, double dt_output,
                                         double floor_rel = kDefaultIdentityFloor);

struct EnvelopeSeries {
  std::vector<double> times;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> class_lower;
  std::vector<double> class_upper;
  std::vector<double> bkm_lambda_integral;
};

struct EnvelopeRow {
  double lower = 0.0;
  double upper = 0.0;
  double class_lower = 0.0;
  double class_upper = 0.0;
  double bkm_lambda_integral = 0.0;
};

/// Incremental trapezoid quadrature of the envelope rates, one record at a
/// time. The class-conditional envelopes are ratios ||w(t)|| / ||w0|| and
/// are NaN when no admissible class is set or after stop_class_envelopes().
class EnvelopeTracker {
 public:
  explicit EnvelopeTracker(std::optional<AdmissibleClass> cls = std::nullopt) : cls_(cls) {}
  EnvelopeRow push(const DiagnosticsRecord& r);
  void stop_class_envelopes() { class_active_ = false; }

 private:
  struct Rates {
    double lower, upper, class_lower, class_upper, bkm;
  };
  Rates rates(const DiagnosticsRecord& r) const;

  std::optional<AdmissibleClass> cls_;
  bool class_active_ = true;
  bool started_ = false;
  double omega0_ = 0.0;
  double t_prev_ = 0.0;
  Rates prev_{};
  Rates integral_{};
};

/// Two-sided envelope of ||w(t)||_2 with lower rate 1/2 inf l2+ - sup |l2-| and
/// upper rate sup l2+ - 1/2 inf |l2-|; also fills bkm_lambda_integral.
EnvelopeSeries vorticity_envelopes(std::span<const DiagnosticsRecord> series);

/// Running trapezoid integral of sup l2+.
std::vector<double> bkm_lambda_integral(std::span<const DiagnosticsRecord> series);

/// Class-conditional envelopes of ||w(t)|| / ||w0||. APlus rates: (1/2 inf|l2|, sup|l2|);
/// AMinus rates: (-sup|l2|, -1/2 inf|l2|).
EnvelopeSeries class_envelopes(std::span<const DiagnosticsRecord> series, AdmissibleClass cls);

/// Estimated trapezoid error of the upper/lower envelopes relative to their
/// magnitude, from comparing cadence h with cadence 2h (error ~ h^2).
double envelope_quadrature_slack(std::span<const DiagnosticsRecord> series);

struct ContainmentReport {
  bool contained = true;
  double max_lower_excess = 0.0;  // max (lower - sqrt Z) / lower, <= 0 when contained
  double max_upper_excess = 0.0;  // max (sqrt Z - upper) / upper
};
/// lower (1 - slack) <= sqrt Z <= upper (1 + slack) at every record.
ContainmentReport check_envelope_containment(std::span<const DiagnosticsRecord> series, const EnvelopeSeries& env,
                                          double slack);

/// sqrt Z(t) <= sqrt Z0 exp(int sup l2+) (1 + rel_tol) at every record.
ContainmentReport check_bkm_inequality(std::span<const DiagnosticsRecord> series, const EnvelopeSeries& env,
                                       double rel_tol);

struct EpsDecayCheck {
  bool applicable = false;
  std::string reason;  // why the bound is inapplicable
  double rhs = 0.0;
  std::vector<double> times;
  std::vector<double> lhs;  // t * (running min eps)^2
  std::vector<bool> satisfied;
  bool all_satisfied = true;
};

/// Right-hand side of the eps decay bound. APlus: sqrt27 |Omega|^{1/2} / (sqrt2 ||w0||);
/// AMinus: sqrt27 |Omega|^{1/2} (sqrt(E0)/H0 - 1 / (sqrt2 ||w0||)), ||w0|| = sqrt(Z0).
double eps_decay_rhs(AdmissibleClass cls, double E0, double H0, double Z0, double volume);

EpsDecayCheck eps_decay_check(std::span<const DiagnosticsRecord> series, AdmissibleClass cls, double E0, double H0,
                             double Z0, double volume);

/// Fourth-order time derivative of w = curl v at window[center] from five
/// equally spaced velocity snapshots.
SpectralVector vorticity_time_derivative(std::span<const SpectralVector> window, double h, int center);

struct VorticityResidual {
  double residual_l2 = 0.0;  // || dw/dt + (v.grad) w - (w.grad) v - nu lap w ||
  double dwdt_l2 = 0.0;
};

/// The nonlinear terms are truncated to the two-thirds cube when dealias is set,
/// matching the discrete dynamics.
VorticityResidual vorticity_equation_residual(const SpectralVector& v, const SpectralVector& dwdt, double nu = 0.0,
                                              bool dealias = true);

/// Sliding five-point windows over a uniform snapshot sequence; one entry per
/// interior index (2 .. m-3). Needs m >= 5.
std::vector<std::pair<double, VorticityResidual>> vorticity_equation_residuals(
    std::span<const SpectralVector> snapshots, std::span<const double> times, double nu = 0.0, bool dealias = true);

/// Fraction of enstrophy in the top third (max-norm) of the retained modes.
double high_mode_enstrophy_fraction(const SpectralVector& v);

/// Throws ContractViolation unless consecutive times differ by h within 1e-9 h.
double uniform_spacing(std::span<const double> times);

}  // namespace eulspec
