#include "eulspec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "eulspec/errors.hpp"
#include "eulspec/log.hpp"

namespace eulspec {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("solver t_final must be non-negative");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("solver nu must be non-negative");
  if (!(cfl_warn > 0.0)) throw ConfigError("solver cfl_warn must be positive");
}

std::int64_t SolverConfig::step_count() const { return std::llround(t_final / dt); }

bool all_finite(const SpectralVector& v) {
  for (const auto& c : v.comp) {
    for (const auto& z : c.modes) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

EulerSolver::EulerSolver(const Grid& grid, SolverConfig config) : grid_(grid), config_(config) {
  config_.validate();
}

SpectralVector EulerSolver::rhs(const SpectralVector& v) {
  const PhysicalVector u = fft_inverse(v);
  const PhysicalVector w = fft_inverse(curl(v));
  const std::size_t npts = grid_.physical_size();

  PhysicalVector cross(grid_);
  double umax2 = 0.0;
  bool finite = true;
  for (std::size_t p = 0; p < npts; ++p) {
    const double a = u[0][p], b = u[1][p], c = u[2][p];
    const double x = w[0][p], y = w[1][p], z = w[2][p];
    cross[0][p] = b * z - c * y;
    cross[1][p] = c * x - a * z;
    cross[2][p] = a * y - b * x;
    umax2 = std::max(umax2, a * a + b * b + c * c);
    finite = finite && std::isfinite(cross[0][p]) && std::isfinite(cross[1][p]) && std::isfinite(cross[2][p]);
  }
  if (!finite) {
    std::ostringstream os;
    os << "non-finite nonlinear term at step " << current_step_;
    throw NumericAbort(os.str(), current_step_);
  }

  const double cfl = std::sqrt(umax2) * config_.dt / grid_.dx();
  max_cfl_ = std::max(max_cfl_, cfl);
  if (cfl > config_.cfl_warn) {
    if (cfl_warnings_ == 0) {
      std::ostringstream os;
      os << "CFL number " << cfl << " exceeds " << config_.cfl_warn << " at step " << current_step_;
      log_warning(os.str());
    }
    ++cfl_warnings_;
  }

  SpectralVector out = fft_forward(cross);
  if (config_.dealias) dealias_23_inplace(out);
  leray_project_inplace(out);

  if (config_.nu > 0.0) {
    const int n = grid_.n();
    const double scale = grid_.wavenumber_scale();
    for (int mz = 0; mz < n; ++mz) {
      for (int my = 0; my < n; ++my) {
        for (int mx = 0; mx < grid_.half_n(); ++mx) {
          const double kx = grid_.frequency(mx) * scale;
          const double ky = grid_.frequency(my) * scale;
          const double kz = grid_.frequency(mz) * scale;
          const double damp = config_.nu * (kx * kx + ky * ky + kz * kz);
          const std::size_t idx = grid_.spectral_index(mx, my, mz);
          for (int c = 0; c < 3; ++c) out[c][idx] -= damp * v[c][idx];
        }
      }
    }
  }
  return out;
}

namespace {

// a + s * b, componentwise.
SpectralVector axpy(const SpectralVector& a, double s, const SpectralVector& b) {
  SpectralVector out = a;
  for (int c = 0; c < 3; ++c) {
    auto& o = out[c].modes;
    const auto& bb = b[c].modes;
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += s * bb[i];
  }
  return out;
}

}  // namespace

SolverState EulerSolver::step_rk4(const SolverState& state) {
  current_step_ = state.step_index + 1;
  const double dt = config_.dt;
  SolverState next{0.0, SpectralVector(grid_), state.step_index + 1};
  try {
    const SpectralVector k1 = rhs(state.v);
    const SpectralVector k2 = rhs(axpy(state.v, 0.5 * dt, k1));
    const SpectralVector k3 = rhs(axpy(state.v, 0.5 * dt, k2));
    const SpectralVector k4 = rhs(axpy(state.v, dt, k3));
    next.v = state.v;
    for (int c = 0; c < 3; ++c) {
      auto& o = next.v[c].modes;
      for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] += (dt / 6.0) * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]);
      }
    }
  } catch (const NumericAbort& e) {
    throw NumericAbort(e.what(), current_step_, state);
  }
  leray_project_inplace(next.v);
  if (config_.dealias) dealias_23_inplace(next.v);
  // Time is derived from the step count so output cadences stay uniform.
  next.t = static_cast<double>(next.step_index) * dt;
  if (!all_finite(next.v)) {
    std::ostringstream os;
    os << "non-finite velocity after step " << next.step_index;
    throw NumericAbort(os.str(), next.step_index, state);
  }
  return next;
}

SolverState EulerSolver::run(const SolverState& initial, const std::vector<Observer>& observers) {
  if (!(initial.v.grid() == grid_)) throw ContractViolation("initial field grid does not match solver grid");
  const std::int64_t last = initial.step_index + config_.step_count();

  auto notify = [&](const SolverState& s) {
    for (const auto& obs : observers) {
      if (obs.every > 0 && s.step_index % obs.every == 0) {
        try {
          obs.callback(s);
        } catch (const std::exception& e) {
          std::ostringstream os;
          os << "observer failed at step " << s.step_index << ": " << e.what();
          std::throw_with_nested(ObserverFailure(os.str(), s.step_index));
        }
      }
    }
  };

  SolverState state = initial;
  notify(state);
  while (state.step_index < last) {
    state = step_rk4(state);
    notify(state);
  }
  return state;
}

SolverState run(const SpectralVector& initial, const SolverConfig& config, const std::vector<Observer>& observers) {
  EulerSolver solver(initial.grid(), config);
  return solver.run(SolverState{0.0, initial, 0}, observers);
}

}  // namespace eulspec
