#pragma once

#include <vector>

#include "eady/constants.hpp"

namespace eady {

/// Uniform Arakawa C-grid on [-L, L] x [0, H], periodic in x.
///
/// Cell (i, k) spans [xf[i], xf[i+1]] x [zf[k], zf[k+1]]. `xf` has nx + 1
/// entries (the last duplicates the periodic image at x = L) and `zf` has
/// nz + 1 entries running from 0 to H.
struct Grid {
  int nx = 0;
  int nz = 0;
  double dx = 0.0;
  double dz = 0.0;
  double L = 0.0;
  double H = 0.0;
  std::vector<double> xc;  // cell centres, nx
  std::vector<double> zc;  // cell centres, nz
  std::vector<double> xf;  // x-faces, nx + 1
  std::vector<double> zf;  // z-faces, nz + 1

  double cell_area() const { return dx * dz; }
  double domain_area() const { return 2.0 * L * H; }
  int wrap(int i) const { return ((i % nx) + nx) % nx; }
};

/// Builds the staggered coordinate arrays. Throws ConfigError if nx or nz < 4.
Grid build_grid(int nx, int nz, const PhysicalConstants& c);

}  // namespace eady
