#include "eady/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "eady/errors.hpp"
#include "eady/thermo.hpp"

namespace eady {

DynamicsOptions dynamics_options(const RunConfig& config) {
  DynamicsOptions o;
  o.form = config.velocity_form;
  o.scalar_order = config.upwinding ? config.scalar_upwind_order : 2;
  o.momentum_upwind = config.upwinding;
  return o;
}

std::vector<double> exner_field(const Fields& state, const PhysicalConstants& c) {
  const auto rho = state.rho();
  const auto theta = state.theta();
  std::vector<double> pi(rho.size());
  const double r_over_p0 = c.R / c.p0;
  const double kappa_v = c.R / c.cv();
  for (std::size_t n = 0; n < pi.size(); ++n) {
    if (!(rho[n] > 0.0) || !(theta[n] > 0.0))
      throw DomainError("non-positive density or theta in state");
    pi[n] = exner_unchecked(rho[n], theta[n], r_over_p0, kappa_v);
  }
  return pi;
}

namespace {

// Derivative of phi along one direction given neighbours; `vel` picks the
// upwind side.
inline double upwind1(double vel, double m1, double c0, double p1, double inv_h) {
  return vel > 0.0 ? (c0 - m1) * inv_h : (p1 - c0) * inv_h;
}

// Face value of phi between cells l and r for mass flux f. ll and rr extend the
// stencil on each side. Order 3 is the fourth-order centred value plus an
// upwind-signed third-difference correction.
inline double face_value(int order, double f, double ll, double l, double r, double rr) {
  switch (order) {
    case 1:
      return f > 0.0 ? l : (f < 0.0 ? r : 0.5 * (l + r));
    case 2:
      return 0.5 * (l + r);
    default: {
      const double sgn = f > 0.0 ? 1.0 : (f < 0.0 ? -1.0 : 0.0);
      return (-ll + 7.0 * l + 7.0 * r - rr) / 12.0 + sgn * (-ll + 3.0 * l - 3.0 * r + rr) / 12.0;
    }
  }
}

}  // namespace

void advect_scalar(std::span<const double> phi, std::span<const double> u, std::span<const double> w,
                   const Grid& grid, int order, std::span<double> out) {
  advect_scalar(phi, u, w, {}, grid, order, out);
}

void advect_scalar(std::span<const double> phi, std::span<const double> u, std::span<const double> w,
                   std::span<const double> rho, const Grid& grid, int order, std::span<double> out) {
  const int nx = grid.nx;
  const int nz = grid.nz;
  const double idx = 1.0 / grid.dx;
  const double idz = 1.0 / grid.dz;
  const bool weighted = !rho.empty();
  auto C = [nz](int i, int k) { return static_cast<std::size_t>(i) * nz + k; };
  auto W = [nz](int i, int k) { return static_cast<std::size_t>(i) * (nz + 1) + k; };
  auto D = [&](std::size_t n) { return weighted ? rho[n] : 1.0; };

  std::fill(out.begin(), out.end(), 0.0);

  // x-face between cells i-1 and i.
  for (int i = 0; i < nx; ++i) {
    const int im2 = grid.wrap(i - 2), im1 = grid.wrap(i - 1), ip1 = grid.wrap(i + 1);
    for (int k = 0; k < nz; ++k) {
      const std::size_t l = C(im1, k), r = C(i, k);
      const double f = 0.5 * (D(l) + D(r)) * u[r];
      const double pf = face_value(order, f, phi[C(im2, k)], phi[l], phi[r], phi[C(ip1, k)]);
      out[l] += f * (pf - phi[l]) * idx;
      out[r] -= f * (pf - phi[r]) * idx;
    }
  }

  // Interior z-faces; the two faces next to the walls drop to first order.
  for (int i = 0; i < nx; ++i) {
    for (int k = 1; k < nz; ++k) {
      const std::size_t l = C(i, k - 1), r = C(i, k);
      const double f = 0.5 * (D(l) + D(r)) * w[W(i, k)];
      int o = order;
      if (o == 3 && (k == 1 || k == nz - 1)) o = 1;
      const double ll = k >= 2 ? phi[C(i, k - 2)] : 0.0;
      const double rr = k <= nz - 2 ? phi[C(i, k + 1)] : 0.0;
      const double pf = face_value(o, f, ll, phi[l], phi[r], rr);
      out[l] += f * (pf - phi[l]) * idz;
      out[r] -= f * (pf - phi[r]) * idz;
    }
  }

  for (std::size_t n = 0; n < out.size(); ++n) out[n] /= D(n);
}

void velocity_advection_advective(const Fields& state, const Grid& grid, bool upwind,
                                  std::span<double> adv_u, std::span<double> adv_w) {
  const int nx = grid.nx;
  const int nz = grid.nz;
  const double idx = 1.0 / grid.dx;
  const double idz = 1.0 / grid.dz;
  const auto u = state.u();
  const auto w = state.w();
  auto C = [nz](int i, int k) { return static_cast<std::size_t>(i) * nz + k; };
  auto W = [nz](int i, int k) { return static_cast<std::size_t>(i) * (nz + 1) + k; };

  auto deriv = [upwind](double vel, double m1, double c0, double p1, double inv_h) {
    return upwind ? upwind1(vel, m1, c0, p1, inv_h) : 0.5 * (p1 - m1) * inv_h;
  };

  for (int i = 0; i < nx; ++i) {
    const int im1 = grid.wrap(i - 1), ip1 = grid.wrap(i + 1);
    for (int k = 0; k < nz; ++k) {
      const double uu = u[C(i, k)];
      const double wu = 0.25 * (w[W(im1, k)] + w[W(i, k)] + w[W(im1, k + 1)] + w[W(i, k + 1)]);
      const double dudx = deriv(uu, u[C(im1, k)], uu, u[C(ip1, k)], idx);
      double dudz;
      if (k == 0) {
        dudz = (u[C(i, 1)] - uu) * idz;
      } else if (k == nz - 1) {
        dudz = (uu - u[C(i, k - 1)]) * idz;
      } else {
        dudz = deriv(wu, u[C(i, k - 1)], uu, u[C(i, k + 1)], idz);
      }
      adv_u[C(i, k)] = uu * dudx + wu * dudz;
    }

    adv_w[W(i, 0)] = 0.0;
    adv_w[W(i, nz)] = 0.0;
    for (int k = 1; k < nz; ++k) {
      const double ww = w[W(i, k)];
      const double uw = 0.25 * (u[C(i, k - 1)] + u[C(ip1, k - 1)] + u[C(i, k)] + u[C(ip1, k)]);
      const double dwdx = deriv(uw, w[W(im1, k)], ww, w[W(ip1, k)], idx);
      const double dwdz = deriv(ww, w[W(i, k - 1)], ww, w[W(i, k + 1)], idz);
      adv_w[W(i, k)] = uw * dwdx + ww * dwdz;
    }
  }
}

void velocity_advection_vector_invariant(const Fields& state, const Grid& grid,
                                         std::span<double> adv_u, std::span<double> adv_w) {
  const int nx = grid.nx;
  const int nz = grid.nz;
  const double idx = 1.0 / grid.dx;
  const double idz = 1.0 / grid.dz;
  const auto u = state.u();
  const auto w = state.w();
  auto C = [nz](int i, int k) { return static_cast<std::size_t>(i) * nz + k; };
  auto W = [nz](int i, int k) { return static_cast<std::size_t>(i) * (nz + 1) + k; };

  // Corner (i, k) sits at (xf[i], zf[k]). Rows 0 and nz carry w = 0, so only
  // eta * u is needed there and it never enters a w-point average.
  std::vector<double> eta_w(static_cast<std::size_t>(nx) * (nz + 1), 0.0);
  std::vector<double> eta_u(static_cast<std::size_t>(nx) * (nz + 1), 0.0);
  std::vector<double> ke(static_cast<std::size_t>(nx) * nz);
  for (int i = 0; i < nx; ++i) {
    const int im1 = grid.wrap(i - 1), ip1 = grid.wrap(i + 1);
    for (int k = 1; k < nz; ++k) {
      const double eta = (u[C(i, k)] - u[C(i, k - 1)]) * idz - (w[W(i, k)] - w[W(im1, k)]) * idx;
      eta_w[W(i, k)] = eta * 0.5 * (w[W(im1, k)] + w[W(i, k)]);
      eta_u[W(i, k)] = eta * 0.5 * (u[C(i, k - 1)] + u[C(i, k)]);
    }
    for (int k = 0; k < nz; ++k) {
      const double uc = 0.5 * (u[C(i, k)] + u[C(ip1, k)]);
      const double wc = 0.5 * (w[W(i, k)] + w[W(i, k + 1)]);
      ke[C(i, k)] = 0.5 * (uc * uc + wc * wc);
    }
  }

  for (int i = 0; i < nx; ++i) {
    const int im1 = grid.wrap(i - 1), ip1 = grid.wrap(i + 1);
    for (int k = 0; k < nz; ++k) {
      const double rot = 0.5 * (eta_w[W(i, k)] + eta_w[W(i, k + 1)]);
      adv_u[C(i, k)] = rot + (ke[C(i, k)] - ke[C(im1, k)]) * idx;
    }
    adv_w[W(i, 0)] = 0.0;
    adv_w[W(i, nz)] = 0.0;
    for (int k = 1; k < nz; ++k) {
      const double rot = -0.5 * (eta_u[W(i, k)] + eta_u[W(ip1, k)]);
      adv_w[W(i, k)] = rot + (ke[C(i, k)] - ke[C(i, k - 1)]) * idz;
    }
  }
}

void tendencies(const Fields& state, const Grid& grid, const PhysicalConstants& c,
                const DynamicsOptions& opts, Fields& out) {
  const int nx = grid.nx;
  const int nz = grid.nz;
  const double idx = 1.0 / grid.dx;
  const double idz = 1.0 / grid.dz;
  const double cp = c.cp;
  const double s = opts.slice_forcing ? c.s() : 0.0;
  auto C = [nz](int i, int k) { return static_cast<std::size_t>(i) * nz + k; };
  auto W = [nz](int i, int k) { return static_cast<std::size_t>(i) * (nz + 1) + k; };

  const auto pi = exner_field(state, c);
  const auto u = state.u();
  const auto w = state.w();
  const auto v = state.v();
  const auto th = state.theta();
  const auto rho = state.rho();

  auto du = out.u();
  auto dw = out.w();
  auto dv = out.v();
  auto dth = out.theta();
  auto drho = out.rho();

  if (opts.form == VelocityForm::kAdvective) {
    velocity_advection_advective(state, grid, opts.momentum_upwind, du, dw);
  } else {
    velocity_advection_vector_invariant(state, grid, du, dw);
  }
  if (opts.form == VelocityForm::kAdvective) {
    advect_scalar(v, u, w, rho, grid, opts.scalar_order, dv);
  } else {
    // y-component of the rotational term: (dv/dx) u + (dv/dz) w with face
    // products averaged to centres; its |v|^2/2 partner cancels exactly.
    advect_scalar(v, u, w, {}, grid, 2, dv);
  }
  advect_scalar(th, u, w, rho, grid, opts.scalar_order, dth);

  for (int i = 0; i < nx; ++i) {
    const int im1 = grid.wrap(i - 1), ip1 = grid.wrap(i + 1);
    for (int k = 0; k < nz; ++k) {
      const std::size_t n = C(i, k), west = C(im1, k), east = C(ip1, k);
      const double theta_face = 0.5 * (th[west] + th[n]);
      const double v_face = 0.5 * (v[west] + v[n]);
      du[n] = -du[n] + c.f * v_face - cp * theta_face * (pi[n] - pi[west]) * idx;

      const double u_c = 0.5 * (u[n] + u[east]);
      dv[n] = -dv[n] - c.f * u_c + cp * s * (pi[n] - c.pi0);
      dth[n] = -dth[n] - v[n] * s;

      const double flux_w = 0.5 * (rho[west] + rho[n]) * u[n];
      const double flux_e = 0.5 * (rho[n] + rho[east]) * u[east];
      const double flux_b = k == 0 ? 0.0 : 0.5 * (rho[C(i, k - 1)] + rho[n]) * w[W(i, k)];
      const double flux_t = k == nz - 1 ? 0.0 : 0.5 * (rho[n] + rho[C(i, k + 1)]) * w[W(i, k + 1)];
      drho[n] = -((flux_e - flux_w) * idx + (flux_t - flux_b) * idz);
    }
    dw[W(i, 0)] = 0.0;
    dw[W(i, nz)] = 0.0;
    for (int k = 1; k < nz; ++k) {
      const std::size_t lo = C(i, k - 1), hi = C(i, k);
      const double theta_face = 0.5 * (th[lo] + th[hi]);
      dw[W(i, k)] = -dw[W(i, k)] - cp * theta_face * (pi[hi] - pi[lo]) * idz - c.g;
    }
  }
}

Tendency tendencies(const State& state, const Grid& grid, const PhysicalConstants& c,
                    const DynamicsOptions& opts) {
  Tendency out(state.nx(), state.nz());
  tendencies(state, grid, c, opts, out);
  return out;
}

}  // namespace eady
