#pragma once

// Velocity gradient, deformation tensor and its ordered eigenvalue fields,
// plus the admissible-class machinery built on the middle eigenvalue.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "eulspec/field.hpp"

namespace eulspec {

/// V(i, j) = d v_j / d x_i, physical representation. Row = derivative direction.
struct VelocityGradient {
  std::array<PhysicalField, 9> comp;

  explicit VelocityGradient(const Grid& g)
      : comp{PhysicalField(g), PhysicalField(g), PhysicalField(g), PhysicalField(g), PhysicalField(g),
             PhysicalField(g), PhysicalField(g), PhysicalField(g), PhysicalField(g)} {}

  PhysicalField& operator()(int i, int j) { return comp[3 * i + j]; }
  const PhysicalField& operator()(int i, int j) const { return comp[3 * i + j]; }
};

/// One symmetric 3x3 matrix.
struct Sym3 {
  double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
};

/// Symmetric deformation tensor per grid point, stored as six fields.
struct SymTensorField {
  // Component order: S11, S12, S13, S22, S23, S33.
  std::array<PhysicalField, 6> comp;

  explicit SymTensorField(const Grid& g)
      : comp{PhysicalField(g), PhysicalField(g), PhysicalField(g), PhysicalField(g), PhysicalField(g),
             PhysicalField(g)} {}

  const Grid& grid() const { return comp[0].grid; }
  static constexpr int slot(int i, int j) {
    constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[i][j];
  }
  PhysicalField& operator()(int i, int j) { return comp[slot(i, j)]; }
  const PhysicalField& operator()(int i, int j) const { return comp[slot(i, j)]; }

  Sym3 at(std::size_t p) const {
    return {comp[0][p], comp[1][p], comp[2][p], comp[3][p], comp[4][p], comp[5][p]};
  }
};

/// Ordered eigenvalues lambda1 >= lambda2 >= lambda3 per grid point.
struct SpectraField {
  PhysicalField l1;
  PhysicalField l2;
  PhysicalField l3;

  explicit SpectraField(const Grid& g) : l1(g), l2(g), l3(g) {}
  const Grid& grid() const { return l1.grid; }
};

VelocityGradient velocity_gradient(const SpectralVector& v);

/// S = (V + V^T) / 2. Logs a warning when the trace is not negligible.
SymTensorField deformation_tensor(const VelocityGradient& V);

/// max |tr S| / max |S_ij| over the grid (0 for S = 0).
double trace_ratio(const SymTensorField& S);

/// Closed-form ordered eigenvalues of a traceless symmetric matrix.
std::array<double, 3> eigenvalues_sym3(const Sym3& s);

/// Pointwise eigenvalues; throws ComputationError on non-finite input.
SpectraField eigenvalues_sym3(const SymTensorField& S);

/// (lambda2+, lambda2-) = (max(lambda2, 0), min(lambda2, 0)).
std::pair<PhysicalField, PhysicalField> lambda2_split(const SpectraField& spectra);

enum class AdmissibleClass { APlus, AMinus, Neither };

std::string to_string(AdmissibleClass c);
std::optional<AdmissibleClass> admissible_class_from_string(const std::string& s);

struct Classification {
  AdmissibleClass cls = AdmissibleClass::Neither;
  double min_lambda2 = 0.0;
  double max_lambda2 = 0.0;
  double tolerance = 0.0;
};

/// 1e-10 times the RMS of lambda1 over the grid.
double default_class_tolerance(const SpectraField& spectra);

Classification classify_admissible(const SpectraField& spectra, double tolerance);

struct EpsilonField {
  PhysicalField eps;  // NaN where the denominator is below the floor
  std::size_t excluded_count = 0;
  double min_eps = 0.0;  // over defined points; NaN if none defined
  double max_eps = 0.0;
};

/// 1e-12 times the RMS of lambda1.
double default_epsilon_floor(const SpectraField& spectra);

/// eps = |lambda2| / lambda with lambda = lambda1 (APlus) or -lambda3 (AMinus).
EpsilonField epsilon_ratio(const SpectraField& spectra, AdmissibleClass cls, double floor);

struct Lambda2Sample {
  double t;
  double min_lambda2;
  double max_lambda2;
};

/// Earliest sample at which the sign condition of the initial class fails
/// by more than the tolerance, or nullopt if it never does.
std::optional<double> first_zero_touching(std::span<const Lambda2Sample> history, const Classification& initial,
                                          double tolerance);

}  // namespace eulspec
