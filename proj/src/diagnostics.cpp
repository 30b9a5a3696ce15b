#include "eulspec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eulspec/errors.hpp"
#include "eulspec/reduce.hpp"

namespace eulspec {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Fn>
double integrate(const Grid& g, Fn&& integrand) {
  PhysicalField f(g);
  const std::size_t npts = g.physical_size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(npts); ++p) f[p] = integrand(static_cast<std::size_t>(p));
  return integrate_domain(f);
}

double rel_residual(double a, double b, double scale) {
  const double denom = std::max({std::abs(a), std::abs(b), scale});
  return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

// Five-point fourth-order first-derivative weights (times 1/(12h)) for the
// sample at offset `pos` within a window of five.
std::array<double, 5> fd_weights(int pos) {
  switch (pos) {
    case 0:
      return {-25.0, 48.0, -36.0, 16.0, -3.0};
    case 1:
      return {-3.0, -10.0, 18.0, -6.0, 1.0};
    case 2:
      return {1.0, -8.0, 0.0, 8.0, -1.0};
    case 3:
      return {-1.0, 6.0, -18.0, 10.0, 3.0};
    case 4:
      return {3.0, -16.0, 36.0, -48.0, 25.0};
    default:
      throw ContractViolation("finite-difference position must lie in [0, 4]");
  }
}

double full_power(const SpectralVector& v) { return spectral_power(v[0]) + spectral_power(v[1]) + spectral_power(v[2]); }

}  // namespace

std::array<double, 16> record_values(const DiagnosticsRecord& r) {
  return {r.t,       r.E,       r.H,           r.Z,           r.Q,      r.P,      r.W,       r.C3,
          r.sup_l2p, r.inf_l2p, r.sup_l2m_abs, r.inf_l2m_abs, r.min_l2, r.max_l2, r.inf_eps, r.bkm_sup_vort};
}

double energy(const PhysicalVector& v) {
  return 0.5 * integrate(v.grid(), [&](std::size_t p) { return v[0][p] * v[0][p] + v[1][p] * v[1][p] + v[2][p] * v[2][p]; });
}

double helicity(const PhysicalVector& v, const PhysicalVector& w) {
  return integrate(v.grid(), [&](std::size_t p) { return v[0][p] * w[0][p] + v[1][p] * w[1][p] + v[2][p] * w[2][p]; });
}

double enstrophy(const PhysicalVector& w) {
  return integrate(w.grid(), [&](std::size_t p) { return w[0][p] * w[0][p] + w[1][p] * w[1][p] + w[2][p] * w[2][p]; });
}

SpectraIntegrals spectra_integrals(const SpectraField& s) {
  SpectraIntegrals out;
  out.Q = integrate(s.grid(), [&](std::size_t p) { return s.l1[p] * s.l1[p] + s.l2[p] * s.l2[p] + s.l3[p] * s.l3[p]; });
  out.P = integrate(s.grid(), [&](std::size_t p) { return s.l1[p] * s.l2[p] * s.l3[p]; });
  return out;
}

double stretching_integral(const SymTensorField& S, const PhysicalVector& w) {
  if (!(S.grid() == w.grid())) throw ContractViolation("stretching_integral: grids differ");
  return integrate(S.grid(), [&](std::size_t p) {
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) sum += S(j, k)[p] * w[j][p] * w[k][p];
    }
    return sum;
  });
}

double cubic_trace_integral(const SymTensorField& S) {
  return integrate(S.grid(), [&](std::size_t p) {
    double m[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = S(i, j)[p];
    }
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) sum += m[k][j] * m[i][k] * m[i][j];
      }
    }
    return sum;
  });
}

double gradient_norm_integral(const VelocityGradient& V) {
  return integrate(V(0, 0).grid, [&](std::size_t p) {
    double sum = 0.0;
    for (const auto& c : V.comp) sum += c[p] * c[p];
    return sum;
  });
}

EpsFormIntegrals eps_form_integrals(const SpectraField& s, AdmissibleClass cls) {
  if (cls == AdmissibleClass::Neither) throw ContractViolation("eps_form_integrals needs APlus or AMinus");
  const bool plus = cls == AdmissibleClass::APlus;
  auto lam = [&](std::size_t p) { return plus ? s.l1[p] : -s.l3[p]; };
  auto eps = [&](std::size_t p) {
    const double l = lam(p);
    return l == 0.0 ? 0.0 : std::abs(s.l2[p]) / l;
  };
  EpsFormIntegrals out;
  out.Y = integrate(s.grid(), [&](std::size_t p) {
    const double l = lam(p), e = eps(p);
    return l * l * (e * e + e + 1.0);
  });
  out.X = integrate(s.grid(), [&](std::size_t p) {
    const double l = lam(p), e = eps(p);
    return l * l * l * (e * e + e);
  });
  return out;
}

FieldAnalysis analyze(const SpectralVector& v) {
  PhysicalVector u = fft_inverse(v);
  PhysicalVector w = fft_inverse(curl(v));
  VelocityGradient grad = velocity_gradient(v);
  SymTensorField S = deformation_tensor(grad);
  SpectraField spectra = eigenvalues_sym3(S);
  return FieldAnalysis{std::move(u), std::move(w), std::move(grad), std::move(S), std::move(spectra)};
}

DiagnosticsRecord compute_record(const FieldAnalysis& a, double t, std::optional<AdmissibleClass> eps_class,
                                 double eps_floor) {
  DiagnosticsRecord r;
  r.t = t;
  r.E = energy(a.v);
  r.H = helicity(a.v, a.w);
  r.Z = enstrophy(a.w);
  const SpectraIntegrals qp = spectra_integrals(a.spectra);
  r.Q = qp.Q;
  r.P = qp.P;
  r.W = stretching_integral(a.S, a.w);
  r.C3 = cubic_trace_integral(a.S);

  const auto [plus, minus] = lambda2_split(a.spectra);
  const MinMax pp = min_max(plus.values);
  const MinMax mm = min_max(minus.values);
  const MinMax l2 = min_max(a.spectra.l2.values);
  r.sup_l2p = pp.max;
  r.inf_l2p = pp.min;
  r.sup_l2m_abs = std::abs(mm.min);
  r.inf_l2m_abs = std::abs(mm.max);
  r.min_l2 = l2.min;
  r.max_l2 = l2.max;

  r.inf_eps = kNaN;
  if (eps_class && *eps_class != AdmissibleClass::Neither) {
    const double floor = eps_floor >= 0.0 ? eps_floor : default_epsilon_floor(a.spectra);
    r.inf_eps = epsilon_ratio(a.spectra, *eps_class, floor).min_eps;
  }

  double vort = 0.0;
  for (std::size_t p = 0; p < a.w.grid().physical_size(); ++p) {
    vort = std::max(vort, std::sqrt(a.w[0][p] * a.w[0][p] + a.w[1][p] * a.w[1][p] + a.w[2][p] * a.w[2][p]));
  }
  r.bkm_sup_vort = vort;
  return r;
}

DiagnosticsRecord compute_record(const SpectralVector& v, double t, std::optional<AdmissibleClass> eps_class,
                                 double eps_floor) {
  return compute_record(analyze(v), t, eps_class, eps_floor);
}

RecordIdentityResiduals record_identity_residuals(const DiagnosticsRecord& r, double volume) {
  const double scale2 = std::abs(r.Z);
  const double scale3 = std::pow(std::abs(r.Z), 1.5) / std::sqrt(volume);
  RecordIdentityResiduals out;
  out.z_vs_2q = rel_residual(r.Z, 2.0 * r.Q, scale2);
  out.w_vs_c3 = rel_residual(r.W, -4.0 / 3.0 * r.C3, scale3);
  out.c3_vs_3p = rel_residual(r.C3, 3.0 * r.P, scale3);
  return out;
}

std::vector<double> fd_derivative_4th(std::span<const double> f, double h) {
  const std::size_t m = f.size();
  if (m < 5) throw ContractViolation("fourth-order differences need at least 5 samples");
  std::vector<double> d(m);
  auto apply = [&](std::size_t start, int pos) {
    const auto w = fd_weights(pos);
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += w[k] * f[start + k];
    return s / (12.0 * h);
  };
  d[0] = apply(0, 0);
  d[1] = apply(0, 1);
  for (std::size_t i = 2; i + 2 < m; ++i) d[i] = apply(i - 2, 2);
  d[m - 2] = apply(m - 5, 3);
  d[m - 1] = apply(m - 5, 4);
  return d;
}

double uniform_spacing(std::span<const double> times) {
  if (times.size() < 2) throw ContractViolation("need at least two samples to define a cadence");
  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(h > 0.0)) throw ContractViolation("sample times must increase");
  const double tol = 1e-9 * h;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - h) > tol) {
      throw ContractViolation("sample times are not uniformly spaced");
    }
  }
  return h;
}

MomentIdentityResidual moment_identity_residual(std::span<const DiagnosticsRecord> series, double dt_output,
                                         double floor_rel) {
  if (series.size() < 5) throw ContractViolation("identity residual needs at least 5 records");
  std::vector<double> times, q, p;
  for (const auto& r : series) {
    times.push_back(r.t);
    q.push_back(r.Q);
    p.push_back(r.P);
  }
  const double h = uniform_spacing(times);
  if (std::abs(h - dt_output) > 1e-9 * dt_output) {
    throw ContractViolation("record cadence does not match dt_output");
  }
  MomentIdentityResidual out;
  out.t = times;
  out.dq = fd_derivative_4th(q, h);
  double scale = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.residual.push_back(out.dq[i] + 4.0 * p[i]);
    scale = std::max({scale, std::abs(out.dq[i]), 4.0 * std::abs(p[i])});
  }
  out.floor = floor_rel * scale;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double denom = std::max({std::abs(out.dq[i]), 4.0 * std::abs(p[i]), out.floor});
    const double n = denom == 0.0 ? 0.0 : std::abs(out.residual[i]) / denom;
    out.normalized.push_back(n);
    out.max_abs = std::max(out.max_abs, std::abs(out.residual[i]));
    out.max_normalized = std::max(out.max_normalized, n);
  }
  return out;
}

EnvelopeTracker::Rates EnvelopeTracker::rates(const DiagnosticsRecord& r) const {
  Rates k{};
  k.lower = 0.5 * r.inf_l2p - r.sup_l2m_abs;
  k.upper = r.sup_l2p - 0.5 * r.inf_l2m_abs;
  k.bkm = r.sup_l2p;
  if (cls_ == AdmissibleClass::APlus) {
    k.class_lower = 0.5 * r.inf_l2p;
    k.class_upper = r.sup_l2p;
  } else if (cls_ == AdmissibleClass::AMinus) {
    k.class_lower = -r.sup_l2m_abs;
    k.class_upper = -0.5 * r.inf_l2m_abs;
  }
  return k;
}

EnvelopeRow EnvelopeTracker::push(const DiagnosticsRecord& r) {
  const Rates cur = rates(r);
  if (!started_) {
    started_ = true;
    omega0_ = std::sqrt(r.Z);
    integral_ = Rates{};
  } else {
    const double half_dt = 0.5 * (r.t - t_prev_);
    integral_.lower += half_dt * (prev_.lower + cur.lower);
    integral_.upper += half_dt * (prev_.upper + cur.upper);
    integral_.class_lower += half_dt * (prev_.class_lower + cur.class_lower);
    integral_.class_upper += half_dt * (prev_.class_upper + cur.class_upper);
    integral_.bkm += half_dt * (prev_.bkm + cur.bkm);
  }
  prev_ = cur;
  t_prev_ = r.t;

  EnvelopeRow row;
  row.lower = omega0_ * std::exp(integral_.lower);
  row.upper = omega0_ * std::exp(integral_.upper);
  const bool has_class = cls_ && *cls_ != AdmissibleClass::Neither && class_active_;
  row.class_lower = has_class ? std::exp(integral_.class_lower) : kNaN;
  row.class_upper = has_class ? std::exp(integral_.class_upper) : kNaN;
  row.bkm_lambda_integral = integral_.bkm;
  return row;
}

namespace {

EnvelopeSeries track(std::span<const DiagnosticsRecord> series, std::optional<AdmissibleClass> cls) {
  if (series.empty()) throw ContractViolation("envelopes need a non-empty series");
  EnvelopeTracker tracker(cls);
  EnvelopeSeries out;
  for (const auto& r : series) {
    const EnvelopeRow row = tracker.push(r);
    out.times.push_back(r.t);
    out.lower.push_back(row.lower);
    out.upper.push_back(row.upper);
    out.class_lower.push_back(row.class_lower);
    out.class_upper.push_back(row.class_upper);
    out.bkm_lambda_integral.push_back(row.bkm_lambda_integral);
  }
  return out;
}

}  // namespace

EnvelopeSeries vorticity_envelopes(std::span<const DiagnosticsRecord> series) {
  return track(series, std::nullopt);
}

std::vector<double> bkm_lambda_integral(std::span<const DiagnosticsRecord> series) {
  return track(series, std::nullopt).bkm_lambda_integral;
}

EnvelopeSeries class_envelopes(std::span<const DiagnosticsRecord> series, AdmissibleClass cls) {
  if (cls == AdmissibleClass::Neither) throw ContractViolation("class-conditional envelopes need APlus or AMinus");
  return track(series, cls);
}

double envelope_quadrature_slack(std::span<const DiagnosticsRecord> series) {
  if (series.size() < 3) return 0.0;
  std::vector<DiagnosticsRecord> coarse;
  for (std::size_t i = 0; i < series.size(); i += 2) coarse.push_back(series[i]);
  const EnvelopeSeries fine = vorticity_envelopes(series);
  const EnvelopeSeries rough = vorticity_envelopes(coarse);
  double slack = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const std::size_t j = 2 * i;
    // Trapezoid error scales as h^2: err(h) ~ (env(2h) - env(h)) / 3.
    slack = std::max(slack, std::abs(rough.lower[i] - fine.lower[j]) / (3.0 * fine.lower[j]));
    slack = std::max(slack, std::abs(rough.upper[i] - fine.upper[j]) / (3.0 * fine.upper[j]));
  }
  return slack;
}

ContainmentReport check_envelope_containment(std::span<const DiagnosticsRecord> series, const EnvelopeSeries& env,
                                          double slack) {
  if (env.lower.size() != series.size()) throw ContractViolation("envelope and record series differ in length");
  ContainmentReport rep;
  rep.max_lower_excess = -std::numeric_limits<double>::infinity();
  rep.max_upper_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double norm = std::sqrt(series[i].Z);
    const double lo = (env.lower[i] - norm) / env.lower[i];
    const double up = (norm - env.upper[i]) / env.upper[i];
    rep.max_lower_excess = std::max(rep.max_lower_excess, lo);
    rep.max_upper_excess = std::max(rep.max_upper_excess, up);
    if (lo > slack || up > slack) rep.contained = false;
  }
  return rep;
}

ContainmentReport check_bkm_inequality(std::span<const DiagnosticsRecord> series, const EnvelopeSeries& env,
                                       double rel_tol) {
  if (env.bkm_lambda_integral.size() != series.size()) {
    throw ContractViolation("envelope and record series differ in length");
  }
  ContainmentReport rep;
  rep.max_upper_excess = -std::numeric_limits<double>::infinity();
  const double omega0 = std::sqrt(series.front().Z);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double bound = omega0 * std::exp(env.bkm_lambda_integral[i]);
    const double excess = bound == 0.0 ? 0.0 : (std::sqrt(series[i].Z) - bound) / bound;
    rep.max_upper_excess = std::max(rep.max_upper_excess, excess);
    if (excess > rel_tol) rep.contained = false;
  }
  return rep;
}

double eps_decay_rhs(AdmissibleClass cls, double E0, double H0, double Z0, double volume) {
  const double omega0 = std::sqrt(Z0);
  const double c = std::sqrt(27.0) * std::sqrt(volume);
  switch (cls) {
    case AdmissibleClass::APlus:
      return c / (std::sqrt(2.0) * omega0);
    case AdmissibleClass::AMinus:
      return c * (std::sqrt(E0) / H0 - 1.0 / (std::sqrt(2.0) * omega0));
    case AdmissibleClass::Neither:
      break;
  }
  throw ContractViolation("eps decay bound needs APlus or AMinus");
}

EpsDecayCheck eps_decay_check(std::span<const DiagnosticsRecord> series, AdmissibleClass cls, double E0, double H0,
                             double Z0, double volume) {
  if (cls == AdmissibleClass::Neither) throw ContractViolation("eps decay bound needs APlus or AMinus");
  if (series.empty()) throw ContractViolation("eps decay bound needs a non-empty series");
  EpsDecayCheck out;
  if (cls == AdmissibleClass::AMinus && !(H0 > 0.0)) {
    out.applicable = false;
    out.reason = "AMinus bound requires H0 > 0";
    return out;
  }
  out.applicable = true;
  out.rhs = eps_decay_rhs(cls, E0, H0, Z0, volume);
  double running_min = kNaN;
  for (const auto& r : series) {
    if (!std::isnan(r.inf_eps)) running_min = std::isnan(running_min) ? r.inf_eps : std::min(running_min, r.inf_eps);
    const double lhs = std::isnan(running_min) ? kNaN : r.t * running_min * running_min;
    const bool ok = std::isnan(lhs) || lhs <= out.rhs;
    out.times.push_back(r.t);
    out.lhs.push_back(lhs);
    out.satisfied.push_back(ok);
    out.all_satisfied = out.all_satisfied && ok;
  }
  return out;
}

SpectralVector vorticity_time_derivative(std::span<const SpectralVector> window, double h, int center) {
  if (window.size() != 5) throw ContractViolation("vorticity time derivative needs exactly 5 snapshots");
  const auto w = fd_weights(center);
  const Grid& g = window[0].grid();
  SpectralVector out(g);
  for (int s = 0; s < 5; ++s) {
    if (!(window[s].grid() == g)) throw ContractViolation("snapshots live on different grids");
    const SpectralVector omega = curl(window[s]);
    const double coeff = w[s] / (12.0 * h);
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < out[c].modes.size(); ++i) out[c][i] += coeff * omega[c][i];
    }
  }
  return out;
}

VorticityResidual vorticity_equation_residual(const SpectralVector& v, const SpectralVector& dwdt, double nu,
                                              bool dealias) {
  const Grid& g = v.grid();
  if (!(dwdt.grid() == g)) throw ContractViolation("vorticity residual: grids differ");
  const SpectralVector omega = curl(v);
  const PhysicalVector u = fft_inverse(v);
  const PhysicalVector w = fft_inverse(omega);
  const VelocityGradient grad_v = velocity_gradient(v);
  const VelocityGradient grad_w = velocity_gradient(omega);

  // (v.grad) w - (w.grad) v
  PhysicalVector adv(g);
  const std::size_t npts = g.physical_size();
  for (int j = 0; j < 3; ++j) {
    for (std::size_t p = 0; p < npts; ++p) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += u[i][p] * grad_w(i, j)[p] - w[i][p] * grad_v(i, j)[p];
      adv[j][p] = s;
    }
  }
  SpectralVector res = fft_forward(adv);
  if (dealias) dealias_23_inplace(res);
  const double scale = g.wavenumber_scale();
  for (int mz = 0; mz < g.n(); ++mz) {
    for (int my = 0; my < g.n(); ++my) {
      for (int mx = 0; mx < g.half_n(); ++mx) {
        const std::size_t idx = g.spectral_index(mx, my, mz);
        const double fx = g.frequency(mx) * scale, fy = g.frequency(my) * scale, fz = g.frequency(mz) * scale;
        const double k2 = fx * fx + fy * fy + fz * fz;
        for (int c = 0; c < 3; ++c) res[c][idx] += dwdt[c][idx] + nu * k2 * omega[c][idx];
      }
    }
  }
  VorticityResidual out;
  out.residual_l2 = std::sqrt(g.volume() * full_power(res));
  out.dwdt_l2 = std::sqrt(g.volume() * full_power(dwdt));
  return out;
}

std::vector<std::pair<double, VorticityResidual>> vorticity_equation_residuals(std::span<const SpectralVector> snapshots,
                                                                               std::span<const double> times,
                                                                               double nu, bool dealias) {
  if (snapshots.size() < 5 || times.size() != snapshots.size()) {
    throw ContractViolation("vorticity residual needs at least 5 snapshots with matching times");
  }
  const double h = uniform_spacing(times);
  std::vector<std::pair<double, VorticityResidual>> out;
  for (std::size_t i = 2; i + 2 < snapshots.size(); ++i) {
    const SpectralVector dwdt = vorticity_time_derivative(snapshots.subspan(i - 2, 5), h, 2);
    out.emplace_back(times[i], vorticity_equation_residual(snapshots[i], dwdt, nu, dealias));
  }
  return out;
}

double high_mode_enstrophy_fraction(const SpectralVector& v) {
  const Grid& g = v.grid();
  const SpectralVector omega = curl(v);
  const int kmax = g.n() / 3;
  double top = 0.0;
  double total = 0.0;
  for (int mz = 0; mz < g.n(); ++mz) {
    for (int my = 0; my < g.n(); ++my) {
      for (int mx = 0; mx < g.half_n(); ++mx) {
        const std::size_t idx = g.spectral_index(mx, my, mz);
        const int kinf = std::max({std::abs(g.frequency(mx)), std::abs(g.frequency(my)), std::abs(g.frequency(mz))});
        double e = 0.0;
        for (int c = 0; c < 3; ++c) e += std::norm(omega[c][idx]);
        e *= half_spectrum_weight(g, mx);
        total += e;
        if (3 * kinf > 2 * kmax) top += e;
      }
    }
  }
  return total == 0.0 ? 0.0 : top / total;
}

}  // namespace eulspec
