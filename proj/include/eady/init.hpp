#pragma once

#include <functional>
#include <span>
#include <vector>

#include "eady/config.hpp"
#include "eady/grid.hpp"
#include "eady/state.hpp"

namespace eady {

/// Parameters of the Eady-mode temperature perturbation.
struct NormalModeParams {
  double a = -7.5;   // amplitude, m s^-1
  double bu = 0.5;   // Burger number
  double n = 0.0;    // mode constant
  double H = 1.0e4;

  /// Modified vertical coordinate Bu (z / H - 1/2).
  double Z(double z) const { return bu * (z / H - 0.5); }
};

NormalModeParams normal_mode_params(double amplitude, const PhysicalConstants& c);

/// Isothermal background theta0 exp(N^2 (z - H/2) / g).
double background_theta(double z, const PhysicalConstants& c);

/// Exact hydrostatic Exner profile of the background theta, given its value at z = 0.
double background_exner(double z, double surface_exner, const PhysicalConstants& c);

/// (limit 1 / sqrt(12)). Throws DomainError for Bu <= 0 and past the cutoff (Bu > 2.3994).
/// (limit 1 / sqrt(12)). Throws DomainError for Bu <= 0.
double mode_constant(double bu);

/// Background theta plus the Eady-mode perturbation, at cell centres.
std::vector<double> perturbed_theta(const Grid& grid, const NormalModeParams& mode,
                                    const PhysicalConstants& c);

struct HydrostaticOptions {
  HydrostaticAnchor anchor = HydrostaticAnchor::kSurface;
  double anchor_exner = 1.0;  // Pi at z = 0; the lid anchor integrates it up to z = H
  double tolerance = 1.0e-12; // max |residual| in units of g
  int max_iterations = 50;
  int max_halvings = 8;
};

/// Per-column Newton trace, mainly for tests.
struct HydrostaticColumnReport {
  std::vector<double> residual_history;  // max-norm residual / g before each step and at exit
  int iterations = 0;
};

/// Solves one column for D such that cp theta_face (Pi_k - Pi_{k-1}) / dz = -g on
/// every interior face, with the anchor closing the system at the floor or lid.
/// Throws SolverError on failure.
HydrostaticColumnReport solve_hydrostatic_column(std::span<const double> theta, double dz,
                                                 const PhysicalConstants& c,
                                                 const HydrostaticOptions& opts,
                                                 std::span<double> rho);

/// Applies solve_hydrostatic_column to every column; errors carry the column index.
std::vector<double> hydrostatic_density(std::span<const double> theta, const Grid& grid,
                                        const PhysicalConstants& c, const HydrostaticOptions& opts);

/// v = cp theta dPi/dx / f at centres (periodic centred difference).
std::vector<double> geostrophic_v(std::span<const double> theta, std::span<const double> rho,
                                  const Grid& grid, const PhysicalConstants& c);

/// u = cp s (Pi - Pi0) / f averaged to x-faces.
std::vector<double> initial_u(std::span<const double> theta, std::span<const double> rho,
                              const Grid& grid, const PhysicalConstants& c);

HydrostaticOptions hydrostatic_options(const RunConfig& config);

/// Full balanced initial state at t = 0 (w = 0).
State initial_state(const RunConfig& config, const Grid& grid);

struct BreedResult {
  double t_breed = 0.0;
  long steps = 0;
  double max_v = 0.0;
};

/// Steps until max|v| >= config.breed_vmax, then resets state.t to 0.
/// Throws SolverError if the threshold is not reached within breed_max_days.
BreedResult breed(State& state, const RunConfig& config, const std::function<void(State&)>& step);

double max_abs(std::span<const double> x);

}  // namespace eady
