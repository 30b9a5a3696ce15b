#include "eulspec/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eulspec/errors.hpp"
#include "eulspec/reduce.hpp"

namespace eulspec {

Grid::Grid(int n, double box_length) : n_(n), box_length_(box_length) {
  if (n < 8 || (n & (n - 1)) != 0) {
    throw ConfigError("grid size n must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ConfigError("box length must be positive and finite");
  }
}

namespace {

int g_threads = 1;

// FFTW planning is not thread-safe; execution with new-array functions is.
class PlanCache {
 public:
  struct Plans {
    fftw_plan forward;
    fftw_plan inverse;
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  Plans get(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(n, g_threads);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    if (!threads_initialized_) {
      fftw_init_threads();
      threads_initialized_ = true;
    }
    fftw_plan_with_nthreads(g_threads);
    const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
    const std::size_t complex_size = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    std::vector<double> r(real_size);
    std::vector<Complex> c(complex_size);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    // ESTIMATE keeps the plan (and therefore every bit of the output) a
    // function of n and the thread count alone.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_r2c_3d(n, n, n, r.data(), cp, flags),
            fftw_plan_dft_c2r_3d(n, n, n, cp, r.data(), flags)};
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

 private:
  std::mutex mutex_;
  bool threads_initialized_ = false;
  std::map<std::pair<int, int>, Plans> plans_;
};

template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  const int n = g.n();
  const int h = g.half_n();
#pragma omp parallel for schedule(static)
  for (int mz = 0; mz < n; ++mz) {
    for (int my = 0; my < n; ++my) {
      for (int mx = 0; mx < h; ++mx) {
        fn(g.spectral_index(mx, my, mz), mx, my, mz);
      }
    }
  }
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw ContractViolation("fields live on different grids");
}

}  // namespace

void set_thread_count(int threads) {
  g_threads = std::max(1, threads);
#ifdef _OPENMP
  omp_set_num_threads(g_threads);
#endif
}

int thread_count() { return g_threads; }

SpectralField fft_forward(const PhysicalField& f) {
  const Grid& g = f.grid;
  SpectralField out(g);
  const auto plans = PlanCache::instance().get(g.n());
  // r2c preserves its input, the const_cast is only for the C signature.
  fftw_execute_dft_r2c(plans.forward, const_cast<double*>(f.values.data()),
                       reinterpret_cast<fftw_complex*>(out.modes.data()));
  const double norm = 1.0 / static_cast<double>(g.physical_size());
  for (auto& c : out.modes) c *= norm;
  return out;
}

PhysicalField fft_inverse(const SpectralField& f) {
  const Grid& g = f.grid;
  PhysicalField out(g);
  std::vector<Complex> scratch = f.modes;  // c2r overwrites its input
  const auto plans = PlanCache::instance().get(g.n());
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.values.data());
  return out;
}

SpectralVector fft_forward(const PhysicalVector& v) {
  return SpectralVector(fft_forward(v[0]), fft_forward(v[1]), fft_forward(v[2]));
}

PhysicalVector fft_inverse(const SpectralVector& v) {
  return PhysicalVector(fft_inverse(v[0]), fft_inverse(v[1]), fft_inverse(v[2]));
}

SpectralField spectral_derivative(const SpectralField& f, Axis axis) {
  const Grid& g = f.grid;
  SpectralField out(g);
  const int a = static_cast<int>(axis);
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const int m[3] = {mx, my, mz};
    const double k = g.derivative_wavenumber(m[a]);
    out[idx] = Complex(0.0, k) * f[idx];
  });
  return out;
}

SpectralVector curl(const SpectralVector& v) {
  const Grid& g = v.grid();
  require_same_grid(g, v[1].grid);
  require_same_grid(g, v[2].grid);
  SpectralVector w(g);
  const Complex I(0.0, 1.0);
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const double kx = g.derivative_wavenumber(mx);
    const double ky = g.derivative_wavenumber(my);
    const double kz = g.derivative_wavenumber(mz);
    const Complex a = v[0][idx], b = v[1][idx], c = v[2][idx];
    w[0][idx] = I * (ky * c - kz * b);
    w[1][idx] = I * (kz * a - kx * c);
    w[2][idx] = I * (kx * b - ky * a);
  });
  return w;
}

void leray_project_inplace(SpectralVector& v) {
  const Grid& g = v.grid();
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const double kx = g.derivative_wavenumber(mx);
    const double ky = g.derivative_wavenumber(my);
    const double kz = g.derivative_wavenumber(mz);
    const double k2 = kx * kx + ky * ky + kz * kz;
    if (k2 == 0.0) return;
    const Complex kdotv = kx * v[0][idx] + ky * v[1][idx] + kz * v[2][idx];
    const Complex s = kdotv / k2;
    v[0][idx] -= kx * s;
    v[1][idx] -= ky * s;
    v[2][idx] -= kz * s;
  });
}

SpectralVector leray_project(SpectralVector v) {
  leray_project_inplace(v);
  return v;
}

bool is_dealiased_mode(const Grid& g, int mx, int my, int mz) {
  const int n = g.n();
  return 3 * std::abs(g.frequency(mx)) > n || 3 * std::abs(g.frequency(my)) > n ||
         3 * std::abs(g.frequency(mz)) > n;
}

void dealias_23_inplace(SpectralField& f) {
  const Grid& g = f.grid;
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    if (is_dealiased_mode(g, mx, my, mz)) f[idx] = Complex{};
  });
}

SpectralField dealias_23(SpectralField f) {
  dealias_23_inplace(f);
  return f;
}

void dealias_23_inplace(SpectralVector& v) {
  for (auto& c : v.comp) dealias_23_inplace(c);
}

double spectral_power(const SpectralField& f) {
  const Grid& g = f.grid;
  std::vector<double> terms(g.spectral_size());
  for_each_mode(g, [&](std::size_t idx, int mx, int, int) {
    terms[idx] = half_spectrum_weight(g, mx) * std::norm(f[idx]);
  });
  return pairwise_sum(terms);
}

double divergence_ratio(const SpectralVector& v) {
  const Grid& g = v.grid();
  double max_div = 0.0;
  double max_mag = 0.0;
  const int n = g.n();
  for (int mz = 0; mz < n; ++mz) {
    for (int my = 0; my < n; ++my) {
      for (int mx = 0; mx < g.half_n(); ++mx) {
        const std::size_t idx = g.spectral_index(mx, my, mz);
        const Complex d = g.derivative_wavenumber(mx) * v[0][idx] + g.derivative_wavenumber(my) * v[1][idx] +
                          g.derivative_wavenumber(mz) * v[2][idx];
        max_div = std::max(max_div, std::abs(d));
        for (int c = 0; c < 3; ++c) max_mag = std::max(max_mag, std::abs(v[c][idx]));
      }
    }
  }
  return max_mag == 0.0 ? 0.0 : max_div / max_mag;
}

double integrate_domain(const PhysicalField& f) {
  return pairwise_sum(f.values) * f.grid.cell_volume();
}

}  // namespace eulspec
