#pragma once

#include <functional>
#include <span>
#include <vector>

#include "eady/config.hpp"
#include "eady/dynamics.hpp"
#include "eady/errors.hpp"
#include "eady/grid.hpp"
#include "eady/state.hpp"

namespace eady {

struct SolverStats {
  int newton_iterations = 0;
  int linear_iterations_total = 0;
  double final_residual_norm = 0.0;
  double tolerance = 0.0;
  bool converged = false;
};

/// Newton failure inside an implicit step; carries the solver statistics.
class NewtonError : public SolverError {
 public:
  NewtonError(const std::string& what, SolverStats stats) : SolverError(what), stats_(stats) {}
  const SolverStats& stats() const noexcept { return stats_; }

 private:
  SolverStats stats_;
};

/// A generic implicit-midpoint problem x' = F(x) on flat vectors.
struct MidpointProblem {
  std::function<void(std::span<const double>, std::span<double>)> rhs;
  /// Optional approximate inverse of I - (dt/2) dF/dx, in unscaled variables.
  std::function<void(std::span<const double>, std::span<double>)> precondition;
  /// Characteristic magnitude of each component; residuals are divided by it
  /// before norming. Empty means all ones.
  std::span<const double> scale;
  /// Optional hook applied to each Newton iterate, given (x0, x1). May throw.
  std::function<void(std::span<const double>, std::span<double>)> accept;
};

/// Solves x1 - x0 - dt F((x0 + x1) / 2) = 0 by matrix-free Newton-GMRES.
/// Throws NewtonError if the residual does not reach tolerance.
SolverStats solve_implicit_midpoint(const MidpointProblem& problem, std::span<const double> x0,
                                    double dt, const SolverConfig& solver, std::span<double> x1);

/// Block-diagonal preconditioner: in every column, the exact inverse of
/// I - (dt/2) L_col, where L_col is the vertical acoustic-gravity operator
/// (pressure gradient and buoyancy on w, vertical mass flux on D, vertical
/// advection of the reference theta) linearised about `reference`.
/// u and v pass through unchanged.
class ColumnPreconditioner {
 public:
  ColumnPreconditioner(const Fields& reference, const Grid& grid, const PhysicalConstants& c, double dt);

  void apply(std::span<const double> in, std::span<double> out) const;
  /// Number of unknowns per column block (3 nz - 1).
  int block_size() const { return n_; }

 private:
  int nx_ = 0;
  int nz_ = 0;
  int n_ = 0;
  int ldab_ = 0;
  std::vector<double> bands_;  // LU factors, one block per column
  std::vector<int> pivots_;
};

/// Largest acoustic Courant number c_s |dt| sqrt(dx^-2 + dz^-2), with
/// c_s = sqrt(cp R Pi theta / cv).
double acoustic_courant(const Fields& state, const Grid& grid, const PhysicalConstants& c, double dt);

/// One SSPRK3 step. Throws ConfigError("dt", ...) if the acoustic Courant
/// number exceeds `cfl_max`.
void step_ssprk3(State& state, double dt, const Grid& grid, const PhysicalConstants& c,
                 const DynamicsOptions& opts, double cfl_max);

/// One implicit midpoint step (dt may be negative).
SolverStats step_implicit_midpoint(State& state, double dt, const Grid& grid,
                                   const PhysicalConstants& c, const DynamicsOptions& opts,
                                   const SolverConfig& solver);

/// Residual scales: u0 for velocities, theta0 for theta, p0 / (R theta0) for D.
std::vector<double> residual_scales(const Fields& layout, const PhysicalConstants& c);

/// The configured integrator bound to a grid.
class Stepper {
 public:
  Stepper(const RunConfig& config, const Grid& grid);
  SolverStats step(State& state) const;
  const DynamicsOptions& options() const { return opts_; }

 private:
  RunConfig config_;
  Grid grid_;
  DynamicsOptions opts_;
};

}  // namespace eady
