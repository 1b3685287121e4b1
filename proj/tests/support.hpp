#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "eady/grid.hpp"
#include "eady/init.hpp"
#include "eady/state.hpp"
#include "eady/thermo.hpp"

namespace eady::testing {

// Steady balanced state sampled from the continuous solution: theta = background,
// Pi from the exact hydrostatic profile, u geostrophic with the background
// y-gradient. Its discrete tendencies are pure truncation error.
inline State analytic_rest_state(const Grid& grid, const PhysicalConstants& c, double surface_exner = 1.0) {
  State s(grid.nx, grid.nz);
  for (int i = 0; i < grid.nx; ++i) {
    for (int k = 0; k < grid.nz; ++k) {
      const double theta = background_theta(grid.zc[k], c);
      const double pi = background_exner(grid.zc[k], surface_exner, c);
      s.theta()[s.c(i, k)] = theta;
      s.rho()[s.c(i, k)] = density_from_exner(pi, theta, c);
      s.u()[s.c(i, k)] = c.cp * c.s() * (pi - c.pi0) / c.f;
    }
  }
  return s;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

}  // namespace eady::testing
