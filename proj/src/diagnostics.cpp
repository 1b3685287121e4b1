#include "eady/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "eady/dynamics.hpp"

namespace eady {

Energies energies(const Fields& state, const Grid& grid, const PhysicalConstants& c) {
  const int nx = grid.nx, nz = grid.nz;
  const auto pi = exner_field(state, c);
  const auto u = state.u();
  const auto w = state.w();
  const auto v = state.v();
  const auto th = state.theta();
  const auto rho = state.rho();
  const double area = grid.cell_area();

  Energies e;
  for (int i = 0; i < nx; ++i) {
    const int ip1 = grid.wrap(i + 1);
    for (int k = 0; k < nz; ++k) {
      const std::size_t n = static_cast<std::size_t>(i) * nz + k;
      const double uc = 0.5 * (u[n] + u[static_cast<std::size_t>(ip1) * nz + k]);
      const std::size_t wn = static_cast<std::size_t>(i) * (nz + 1) + k;
      const double wc = 0.5 * (w[wn] + w[wn + 1]);
      e.ku += 0.5 * rho[n] * (uc * uc + wc * wc) * area;
      e.kv += 0.5 * rho[n] * v[n] * v[n] * area;
      e.p += rho[n] * (c.g * grid.zc[k] + c.cv() * pi[n] * th[n] - c.cp * c.pi0 * th[n]) * area;
    }
  }
  e.e = e.ku + e.kv + e.p;
  return e;
}

double rmsv(const Fields& state, const Grid& grid, RmsvWeighting weighting) {
  const auto v = state.v();
  const auto rho = state.rho();
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double wgt = weighting == RmsvWeighting::kMass ? rho[n] : 1.0;
    num += wgt * v[n] * v[n];
    den += wgt;
  }
  (void)grid;
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double total_mass(const Fields& state, const Grid& grid) {
  double m = 0.0;
  for (double d : state.rho()) m += d;
  return m * grid.cell_area();
}

PVField potential_vorticity(const Fields& state, const Grid& grid, const PhysicalConstants& c) {
  const int nx = grid.nx, nz = grid.nz;
  const double idx = 1.0 / grid.dx, idz = 1.0 / grid.dz;
  const double s = c.s();
  const auto u = state.u();
  const auto w = state.w();
  const auto v = state.v();
  const auto th = state.theta();
  auto C = [nz](int i, int k) { return static_cast<std::size_t>(i) * nz + k; };
  auto W = [nz](int i, int k) { return static_cast<std::size_t>(i) * (nz + 1) + k; };

  PVField pv;
  pv.nx = nx;
  pv.nz = nz;
  pv.q.resize(static_cast<std::size_t>(nx) * (nz + 1));
  for (int i = 0; i < nx; ++i) {
    const int im1 = grid.wrap(i - 1);
    for (int k = 0; k <= nz; ++k) {
      const int kz = std::clamp(k, 1, nz - 1);  // row pair used for z-derivatives
      const int lo = std::max(k - 1, 0), hi = std::min(k, nz - 1);
      const double dudz = (u[C(i, kz)] - u[C(i, kz - 1)]) * idz;
      const double dwdx = (w[W(i, k)] - w[W(im1, k)]) * idx;
      const double dthdz =
          0.5 * ((th[C(im1, kz)] - th[C(im1, kz - 1)]) + (th[C(i, kz)] - th[C(i, kz - 1)])) * idz;
      const double dvdz =
          0.5 * ((v[C(im1, kz)] - v[C(im1, kz - 1)]) + (v[C(i, kz)] - v[C(i, kz - 1)])) * idz;
      const double dthdx =
          0.5 * ((th[C(i, lo)] - th[C(im1, lo)]) + (th[C(i, hi)] - th[C(im1, hi)])) * idx;
      const double dvdx = 0.5 * ((v[C(i, lo)] - v[C(im1, lo)]) + (v[C(i, hi)] - v[C(im1, hi)])) * idx;
      pv.q[W(i, k)] = s * (dudz - dwdx) + dthdz * (dvdx + c.f) - dthdx * dvdz;
    }
  }
  return pv;
}

double front_intensity(const Fields& state, const Grid& grid) {
  const int nx = grid.nx, nz = grid.nz;
  const auto th = state.theta();
  double m = 0.0;
  for (int i = 0; i < nx; ++i) {
    const std::size_t e = static_cast<std::size_t>(grid.wrap(i + 1)) * nz;
    const std::size_t wst = static_cast<std::size_t>(grid.wrap(i - 1)) * nz;
    for (int k = 0; k < nz; ++k) m = std::max(m, std::abs(th[e + k] - th[wst + k]) / (2.0 * grid.dx));
  }
  return m;
}

double noise_metric(const Fields& state, const Grid& grid) {
  const int nx = grid.nx, nz = grid.nz;
  const auto v = state.v();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < nx; ++i) {
    const std::size_t e = static_cast<std::size_t>(grid.wrap(i + 1)) * nz;
    const std::size_t c = static_cast<std::size_t>(i) * nz;
    const std::size_t wst = static_cast<std::size_t>(grid.wrap(i - 1)) * nz;
    for (int k = 0; k < nz; ++k) {
      const double d2 = v[e + k] - 2.0 * v[c + k] + v[wst + k];
      num += d2 * d2;
      den += v[c + k] * v[c + k];
    }
  }
  return std::sqrt(num) / (std::sqrt(den) + 1.0e-12);
}

DiagnosticRecord diagnose(const State& state, const Grid& grid, const PhysicalConstants& c,
                          RmsvWeighting weighting) {
  DiagnosticRecord r;
  r.t = state.t;
  const Energies e = energies(state, grid, c);
  r.ku = e.ku;
  r.kv = e.kv;
  r.p = e.p;
  r.e = e.e;
  r.rmsv = rmsv(state, grid, weighting);
  r.mass = total_mass(state, grid);
  r.front_intensity = front_intensity(state, grid);
  r.noise_metric = noise_metric(state, grid);
  return r;
}

}  // namespace eady
