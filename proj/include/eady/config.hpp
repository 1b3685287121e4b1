#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eady/constants.hpp"

namespace eady {

enum class Integrator { kImplicitMidpoint, kSsprk3 };
enum class VelocityForm { kAdvective, kVectorInvariant };
enum class Preconditioner { kNone, kColumn };
enum class HydrostaticAnchor { kSurface, kLid };
enum class RmsvWeighting { kArea, kMass };

/// Newton-Krylov parameters for the implicit midpoint step.
///
/// Residual norms are RMS values of the residual nondimensionalised by u0
/// (velocities), theta0 (theta) and p0 / (R theta0) (density).
struct SolverConfig {
  double newton_abs_tol = 1.0e-11;
  double newton_rel_tol = 1.0e-8;
  int newton_max_iters = 30;
  double linear_rel_tol = 1.0e-4;
  int linear_max_iters = 200;
  int linear_restart = 30;
  /// Scale of the finite-difference Jacobian probe, multiplied by
  /// (1 + |S|) / |dS|. Default sqrt(machine epsilon).
  double jacobian_fd_epsilon = 1.4901161193847656e-08;
  Preconditioner preconditioner = Preconditioner::kColumn;
};

struct RunConfig {
  PhysicalConstants constants;
  int nx = 30;
  int nz = 30;
  double dt = 300.0;
  Integrator integrator = Integrator::kImplicitMidpoint;
  VelocityForm velocity_form = VelocityForm::kAdvective;
  int scalar_upwind_order = 3;
  /// false switches every advection operator to centred differences.
  bool upwinding = true;

  double amplitude = -7.5;   // perturbation amplitude a, m s^-1
  bool breed = true;
  double breed_vmax = 3.0;   // m s^-1
  double breed_max_days = 10.0;
  double run_days = 25.0;

  double snapshot_interval = 43200.0;
  double timeseries_interval = 3600.0;
  double checkpoint_interval = 0.0;  // 0 disables checkpoints

  SolverConfig solver;
  double cfl_max = 0.9;
  HydrostaticAnchor anchor = HydrostaticAnchor::kSurface;
  double anchor_exner = 1.0;
  RmsvWeighting rmsv_weighting = RmsvWeighting::kArea;
  std::string output_dir = "output";
};

/// Returns the config unchanged if every invariant holds; otherwise throws
/// ConfigError naming the first offending key.
RunConfig validate_config(const RunConfig& config);

/// Flat key/value view of a config, in the documented key order.
std::vector<std::pair<std::string, std::string>> config_to_pairs(const RunConfig& config);

/// Sets one key from its text value. Throws ConfigError for unknown keys or
/// unparseable values (the message lists allowed values for enums).
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// All recognised keys, in documented order.
const std::vector<std::string>& config_keys();

std::string to_string(Integrator v);
std::string to_string(VelocityForm v);
std::string to_string(Preconditioner v);
std::string to_string(HydrostaticAnchor v);
std::string to_string(RmsvWeighting v);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

/// FNV-1a over the canonical key=value echo; stable across platforms.
std::string config_hash(const RunConfig& config);

}  // namespace eady
