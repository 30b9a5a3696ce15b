#pragma once

// Scalar and vector fields on the periodic box [0, L)^3 with a cubic grid,
// in physical (real samples) or spectral (half-spectrum Fourier
// coefficients) representation.
//
// Physical layout: index = i + n * (j + n * k), x fastest.
// Spectral layout: index = kx + (n/2 + 1) * (ky + n * kz), kx in [0, n/2].
// Coefficients are normalized so that mode 0 holds the mean of the samples.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace eulspec {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class Axis { X = 0, Y = 1, Z = 2 };

class Grid {
 public:
  explicit Grid(int n, double box_length = kTwoPi);

  int n() const { return n_; }
  int half_n() const { return n_ / 2 + 1; }
  double box_length() const { return box_length_; }
  double dx() const { return box_length_ / n_; }
  double cell_volume() const { return dx() * dx() * dx(); }
  double volume() const { return box_length_ * box_length_ * box_length_; }
  /// 2*pi / L: converts integer frequencies to physical wavenumbers.
  double wavenumber_scale() const { return kTwoPi / box_length_; }

  std::size_t physical_size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * n_ * half_n(); }

  /// Integer frequency of array position m along an axis, in [-n/2, n/2).
  int frequency(int m) const { return m < n_ / 2 ? m : m - n_; }
  bool is_nyquist(int m) const { return m == n_ / 2; }
  /// Wavenumber used by first-derivative operators; zero on the Nyquist plane.
  double derivative_wavenumber(int m) const {
    return is_nyquist(m) ? 0.0 : frequency(m) * wavenumber_scale();
  }
  /// Coordinate of grid position m along an axis.
  double coordinate(int m) const { return m * dx(); }

  std::size_t physical_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * (j + static_cast<std::size_t>(n_) * k);
  }
  std::size_t spectral_index(int mx, int my, int mz) const {
    return static_cast<std::size_t>(mx) + static_cast<std::size_t>(half_n()) * (my + static_cast<std::size_t>(n_) * mz);
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.box_length_ == b.box_length_;
  }

 private:
  int n_;
  double box_length_;
};

struct PhysicalField {
  Grid grid;
  std::vector<double> values;

  explicit PhysicalField(const Grid& g) : grid(g), values(g.physical_size(), 0.0) {}
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

struct SpectralField {
  Grid grid;
  std::vector<Complex> modes;

  explicit SpectralField(const Grid& g) : grid(g), modes(g.spectral_size(), Complex{}) {}
  Complex& operator[](std::size_t i) { return modes[i]; }
  const Complex& operator[](std::size_t i) const { return modes[i]; }
};

template <typename Field>
struct Vec3 {
  std::array<Field, 3> comp;

  explicit Vec3(const Grid& g) : comp{Field(g), Field(g), Field(g)} {}
  Vec3(Field a, Field b, Field c) : comp{std::move(a), std::move(b), std::move(c)} {}

  Field& operator[](int i) { return comp[i]; }
  const Field& operator[](int i) const { return comp[i]; }
  const Grid& grid() const { return comp[0].grid; }
};

using PhysicalVector = Vec3<PhysicalField>;
using SpectralVector = Vec3<SpectralField>;

// Thread control. EULER_SPECTRA_THREADS is read by the CLI and forwarded here.
void set_thread_count(int threads);
int thread_count();

SpectralField fft_forward(const PhysicalField& f);
PhysicalField fft_inverse(const SpectralField& f);
SpectralVector fft_forward(const PhysicalVector& v);
PhysicalVector fft_inverse(const SpectralVector& v);

/// Multiplies mode k by i*k_axis; the Nyquist plane of that axis becomes zero.
SpectralField spectral_derivative(const SpectralField& f, Axis axis);

SpectralVector curl(const SpectralVector& v);

/// Removes the gradient part: v(k) - k (k.v(k)) / |k|^2. Mode 0 is untouched.
void leray_project_inplace(SpectralVector& v);
SpectralVector leray_project(SpectralVector v);

/// Two-thirds rule: zero every mode with 3 |k_axis| > n on any axis.
void dealias_23_inplace(SpectralField& f);
SpectralField dealias_23(SpectralField f);
void dealias_23_inplace(SpectralVector& v);
/// True for modes the two-thirds rule removes.
bool is_dealiased_mode(const Grid& g, int mx, int my, int mz);

/// Sum of |f(k)|^2 over the full (both halves) spectrum.
double spectral_power(const SpectralField& f);

/// max_k |k . v(k)| / max_k |v(k)| with derivative wavenumbers. Zero for v = 0.
double divergence_ratio(const SpectralVector& v);

/// Deterministic pairwise sum of values times cell volume.
double integrate_domain(const PhysicalField& f);

/// Multiplicity of a half-spectrum position in the full spectrum (1 or 2).
inline double half_spectrum_weight(const Grid& g, int mx) {
  return (mx == 0 || mx == g.n() / 2) ? 1.0 : 2.0;
}

}  // namespace eulspec
