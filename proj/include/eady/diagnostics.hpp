#pragma once

#include <vector>

#include "eady/config.hpp"
#include "eady/grid.hpp"
#include "eady/state.hpp"

namespace eady {

/// One sample of the scalar diagnostics. Energies are per unit y-width (J m^-1).
struct DiagnosticRecord {
  double t = 0.0;
  double ku = 0.0;
  double kv = 0.0;
  double p = 0.0;
  double e = 0.0;
  double rmsv = 0.0;
  double mass = 0.0;             // kg m^-1
  double front_intensity = 0.0;  // K m^-1
  double noise_metric = 0.0;
  int newton_iters = 0;
  int gmres_iters = 0;
};

struct Energies {
  double ku = 0.0;
  double kv = 0.0;
  double p = 0.0;
  double e = 0.0;
};

/// Midpoint-rule energies: 1/2 D |u|^2 with u, w averaged to centres,
/// 1/2 D v^2, and D (g z + cv Pi theta - cp Pi0 theta).
Energies energies(const Fields& state, const Grid& grid, const PhysicalConstants& c);

/// Area-weighted (default) or mass-weighted root mean square of v.
double rmsv(const Fields& state, const Grid& grid, RmsvWeighting weighting = RmsvWeighting::kArea);

double total_mass(const Fields& state, const Grid& grid);

/// Potential vorticity at cell corners, q(i, k) at (xf[i], zf[k]),
/// k = 0 .. nz. Index i * (nz + 1) + k.
struct PVField {
  int nx = 0;
  int nz = 0;
  std::vector<double> q;
  double at(int i, int k) const { return q[static_cast<std::size_t>(i) * (nz + 1) + k]; }
};

/// q = s (du/dz - dw/dx) + dtheta/dz (dv/dx + f) - dtheta/dx dv/dz with compact
/// corner differences. On the floor and lid rows, z-derivatives use the nearest
/// interior corner row and x-derivatives use the adjacent cell row.
PVField potential_vorticity(const Fields& state, const Grid& grid, const PhysicalConstants& c);

/// max over centres of |theta(i+1) - theta(i-1)| / (2 dx).
double front_intensity(const Fields& state, const Grid& grid);

/// ||v(i+1) - 2 v(i) + v(i-1)||_2 / (||v||_2 + 1e-12).
double noise_metric(const Fields& state, const Grid& grid);

DiagnosticRecord diagnose(const State& state, const Grid& grid, const PhysicalConstants& c,
                          RmsvWeighting weighting = RmsvWeighting::kArea);

}  // namespace eady
