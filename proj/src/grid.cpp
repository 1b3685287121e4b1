#include "eady/grid.hpp"

#include "eady/errors.hpp"

namespace eady {

Grid build_grid(int nx, int nz, const PhysicalConstants& c) {
  if (nx < 4) throw ConfigError("nx", "cell count must be at least 4");
  if (nz < 4) throw ConfigError("nz", "cell count must be at least 4");

  Grid g;
  g.nx = nx;
  g.nz = nz;
  g.L = c.L;
  g.H = c.H;
  g.dx = 2.0 * c.L / nx;
  g.dz = c.H / nz;

  g.xf.resize(nx + 1);
  g.xc.resize(nx);
  for (int i = 0; i < nx; ++i) {
    g.xf[i] = -c.L + i * g.dx;
    g.xc[i] = g.xf[i] + 0.5 * g.dx;
  }
  g.xf[nx] = c.L;

  g.zf.resize(nz + 1);
  g.zc.resize(nz);
  for (int k = 0; k < nz; ++k) {
    g.zf[k] = k * g.dz;
    g.zc[k] = g.zf[k] + 0.5 * g.dz;
  }
  g.zf[nz] = c.H;
  return g;
}

}  // namespace eady
