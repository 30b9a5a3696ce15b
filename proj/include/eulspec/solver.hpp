#pragma once

// Pseudospectral RK4 integrator for the incompressible Euler equations in
// rotational form, dv/dt = P[v x w] - nu |k|^2 v, with the pressure removed
// by Leray projection.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulspec/field.hpp"

namespace eulspec {

struct SolverConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  double nu = 0.0;
  bool dealias = true;
  double cfl_warn = 1.0;

  /// Throws ConfigError unless dt > 0, t_final >= 0, nu >= 0.
  void validate() const;
  std::int64_t step_count() const;
};

struct SolverState {
  double t = 0.0;
  SpectralVector v;
  std::int64_t step_index = 0;
};

/// Raised when a non-finite value appears. Carries the last finite state
/// when the failure happened inside a time step.
class NumericAbort : public std::runtime_error {
 public:
  NumericAbort(const std::string& what, std::int64_t step, std::optional<SolverState> last_good = std::nullopt)
      : std::runtime_error(what), step_(step), last_good_(std::move(last_good)) {}
  std::int64_t step() const { return step_; }
  const std::optional<SolverState>& last_good() const { return last_good_; }

 private:
  std::int64_t step_;
  std::optional<SolverState> last_good_;
};

/// Raised when an observer throws. The original exception is nested.
class ObserverFailure : public std::runtime_error {
 public:
  ObserverFailure(const std::string& what, std::int64_t step) : std::runtime_error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

struct Observer {
  std::int64_t every = 1;  // invoked when step_index % every == 0, including step 0
  std::function<void(const SolverState&)> callback;
};

class EulerSolver {
 public:
  EulerSolver(const Grid& grid, SolverConfig config);

  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return config_; }

  /// P[v x curl v] (dealiased when configured) - nu |k|^2 v.
  SpectralVector rhs(const SpectralVector& v);

  SolverState step_rk4(const SolverState& state);

  /// Steps from initial.t until config.step_count() steps have been taken.
  SolverState run(const SolverState& initial, const std::vector<Observer>& observers);

  /// Largest CFL number max|v| dt / dx seen in any rhs evaluation so far.
  double max_cfl() const { return max_cfl_; }
  std::int64_t cfl_warnings() const { return cfl_warnings_; }

 private:
  Grid grid_;
  SolverConfig config_;
  double max_cfl_ = 0.0;
  std::int64_t cfl_warnings_ = 0;
  std::int64_t current_step_ = 0;
};

/// Convenience wrapper around EulerSolver::run starting at t = 0.
SolverState run(const SpectralVector& initial, const SolverConfig& config, const std::vector<Observer>& observers);

bool all_finite(const SpectralVector& v);

}  // namespace eulspec
