#include "eulspec/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "eulspec/errors.hpp"
#include "eulspec/log.hpp"
#include "eulspec/reduce.hpp"

namespace eulspec {
namespace {

using Vec = std::array<double, 3>;

Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec scaled(const Vec& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
Vec mat_vec(const Sym3& s, const Vec& u) {
  return {s.xx * u[0] + s.xy * u[1] + s.xz * u[2], s.xy * u[0] + s.yy * u[1] + s.yz * u[2],
          s.xz * u[0] + s.yz * u[1] + s.zz * u[2]};
}

double rms(const PhysicalField& f) {
  std::vector<double> sq(f.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f[i] * f[i];
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

}  // namespace

VelocityGradient velocity_gradient(const SpectralVector& v) {
  VelocityGradient V(v.grid());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      V(i, j) = fft_inverse(spectral_derivative(v[j], static_cast<Axis>(i)));
    }
  }
  return V;
}

SymTensorField deformation_tensor(const VelocityGradient& V) {
  const Grid& g = V(0, 0).grid;
  SymTensorField S(g);
  const std::size_t npts = g.physical_size();
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      auto& out = S(i, j).values;
      const auto& a = V(i, j).values;
      const auto& b = V(j, i).values;
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(npts); ++p) out[p] = 0.5 * (a[p] + b[p]);
    }
  }
  const double ratio = trace_ratio(S);
  if (ratio > 1e-10) {
    std::ostringstream os;
    os << "deformation tensor trace ratio " << ratio << " exceeds 1e-10; velocity is not solenoidal";
    log_warning(os.str());
  }
  return S;
}

double trace_ratio(const SymTensorField& S) {
  double max_trace = 0.0;
  double max_entry = 0.0;
  const std::size_t npts = S.grid().physical_size();
  for (std::size_t p = 0; p < npts; ++p) {
    max_trace = std::max(max_trace, std::abs(S(0, 0)[p] + S(1, 1)[p] + S(2, 2)[p]));
  }
  for (const auto& c : S.comp) max_entry = std::max(max_entry, max_abs(c.values));
  return max_entry == 0.0 ? 0.0 : max_trace / max_entry;
}

std::array<double, 3> eigenvalues_sym3(const Sym3& in) {
  // Work on the deviatoric part; a traceless input gives q ~ rounding.
  const double q = (in.xx + in.yy + in.zz) / 3.0;
  Sym3 s = in;
  s.xx -= q;
  s.yy -= q;
  s.zz -= q;

  const double off = s.xy * s.xy + s.xz * s.xz + s.yz * s.yz;
  const double p = (s.xx * s.xx + s.yy * s.yy + s.zz * s.zz + 2.0 * off) / 6.0;
  if (p == 0.0) return {q, q, q};

  const double det = s.xx * (s.yy * s.zz - s.yz * s.yz) - s.xy * (s.xy * s.zz - s.yz * s.xz) +
                     s.xz * (s.xy * s.yz - s.yy * s.xz);
  const double sp = std::sqrt(p);
  double ratio = (det / 2.0) / (p * sp);
  if (std::isnan(ratio)) ratio = 0.0;
  ratio = std::clamp(ratio, -1.0, 1.0);
  const double theta = std::acos(ratio) / 3.0;

  // The root of largest magnitude is well separated from the other two, so
  // the trigonometric formula is accurate for it. Its sign follows det.
  const double isolated = det >= 0.0 ? 2.0 * sp * std::cos(theta)
                                      : 2.0 * sp * std::cos(theta - 4.0 * std::numbers::pi / 3.0);

  // Eigenvector of the isolated root from the null space of S - mu I.
  const Vec r0{s.xx - isolated, s.xy, s.xz};
  const Vec r1{s.xy, s.yy - isolated, s.yz};
  const Vec r2{s.xz, s.yz, s.zz - isolated};
  const Vec c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  const double n01 = dot(c01, c01), n02 = dot(c02, c02), n12 = dot(c12, c12);
  Vec e = c01;
  double ne = n01;
  if (n02 > ne) e = c02, ne = n02;
  if (n12 > ne) e = c12, ne = n12;
  if (ne == 0.0) e = {1.0, 0.0, 0.0}, ne = 1.0;
  e = scaled(e, 1.0 / std::sqrt(ne));

  // Orthonormal basis (u, w) of the complement; the 2x2 restriction has
  // eigenvalues mid +- hypot, free of the cancellation near double roots.
  const int smallest = (std::abs(e[0]) <= std::abs(e[1]) && std::abs(e[0]) <= std::abs(e[2])) ? 0
                       : (std::abs(e[1]) <= std::abs(e[2]))                                    ? 1
                                                                                               : 2;
  Vec axis{0.0, 0.0, 0.0};
  axis[smallest] = 1.0;
  Vec u = cross(e, axis);
  u = scaled(u, 1.0 / std::sqrt(dot(u, u)));
  const Vec w = cross(e, u);
  const Vec su = mat_vec(s, u);
  const Vec sw = mat_vec(s, w);
  const double a = dot(u, su);
  const double b = dot(w, su);
  const double c = dot(w, sw);
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);

  std::array<double, 3> lam{isolated + q, mid + rad + q, mid - rad + q};
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return lam;
}

SpectraField eigenvalues_sym3(const SymTensorField& S) {
  const Grid& g = S.grid();
  const std::size_t npts = g.physical_size();
  for (std::size_t p = 0; p < npts; ++p) {
    for (const auto& c : S.comp) {
      if (!std::isfinite(c[p])) throw ComputationError("non-finite deformation tensor entry", p);
    }
  }
  SpectraField out(g);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(npts); ++p) {
    const auto lam = eigenvalues_sym3(S.at(p));
    out.l1[p] = lam[0];
    out.l2[p] = lam[1];
    out.l3[p] = lam[2];
  }
  return out;
}

std::pair<PhysicalField, PhysicalField> lambda2_split(const SpectraField& spectra) {
  PhysicalField plus(spectra.grid()), minus(spectra.grid());
  for (std::size_t p = 0; p < plus.values.size(); ++p) {
    plus[p] = std::max(spectra.l2[p], 0.0);
    minus[p] = std::min(spectra.l2[p], 0.0);
  }
  return {std::move(plus), std::move(minus)};
}

std::string to_string(AdmissibleClass c) {
  switch (c) {
    case AdmissibleClass::APlus:
      return "APlus";
    case AdmissibleClass::AMinus:
      return "AMinus";
    case AdmissibleClass::Neither:
      return "Neither";
  }
  return "Neither";
}

std::optional<AdmissibleClass> admissible_class_from_string(const std::string& s) {
  if (s == "APlus") return AdmissibleClass::APlus;
  if (s == "AMinus") return AdmissibleClass::AMinus;
  if (s == "Neither") return AdmissibleClass::Neither;
  return std::nullopt;
}

double default_class_tolerance(const SpectraField& spectra) { return 1e-10 * rms(spectra.l1); }

double default_epsilon_floor(const SpectraField& spectra) { return 1e-12 * rms(spectra.l1); }

Classification classify_admissible(const SpectraField& spectra, double tolerance) {
  const MinMax mm = min_max(spectra.l2.values);
  Classification c;
  c.min_lambda2 = mm.min;
  c.max_lambda2 = mm.max;
  c.tolerance = tolerance;
  if (mm.min > tolerance) {
    c.cls = AdmissibleClass::APlus;
  } else if (mm.max < -tolerance) {
    c.cls = AdmissibleClass::AMinus;
  }
  return c;
}

EpsilonField epsilon_ratio(const SpectraField& spectra, AdmissibleClass cls, double floor) {
  if (cls == AdmissibleClass::Neither) {
    throw ContractViolation("epsilon ratio is only defined on the admissible classes APlus/AMinus");
  }
  EpsilonField out{PhysicalField(spectra.grid())};
  const std::size_t npts = spectra.grid().physical_size();
  for (std::size_t p = 0; p < npts; ++p) {
    const double denom = cls == AdmissibleClass::APlus ? spectra.l1[p] : -spectra.l3[p];
    if (denom > floor) {
      out.eps[p] = std::abs(spectra.l2[p]) / denom;
    } else {
      out.eps[p] = std::numeric_limits<double>::quiet_NaN();
      ++out.excluded_count;
    }
  }
  if (out.excluded_count == npts) {
    out.min_eps = out.max_eps = std::numeric_limits<double>::quiet_NaN();
  } else {
    const MinMax mm = min_max(out.eps.values);
    out.min_eps = mm.min;
    out.max_eps = mm.max;
  }
  return out;
}

std::optional<double> first_zero_touching(std::span<const Lambda2Sample> history, const Classification& initial,
                                          double tolerance) {
  if (history.empty()) throw ContractViolation("first_zero_touching needs a non-empty history");
  if (initial.cls == AdmissibleClass::Neither) {
    throw ContractViolation("first_zero_touching needs an APlus or AMinus initial class");
  }
  for (const auto& s : history) {
    const bool violated =
        initial.cls == AdmissibleClass::APlus ? s.min_lambda2 < -tolerance : s.max_lambda2 > tolerance;
    if (violated) return s.t;
  }
  return std::nullopt;
}

}  // namespace eulspec
