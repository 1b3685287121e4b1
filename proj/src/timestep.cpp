#include "eady/timestep.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "eady/krylov.hpp"
#include "eady/thermo.hpp"

namespace eady {

namespace {
double rms(std::span<const double> x) {
  return x.empty() ? 0.0 : norm2(x) / std::sqrt(static_cast<double>(x.size()));
}
}  // namespace

SolverStats solve_implicit_midpoint(const MidpointProblem& problem, std::span<const double> x0,
                                    double dt, const SolverConfig& solver, std::span<double> x1) {
  const std::size_t n = x0.size();
  std::vector<double> inv_scale(n, 1.0);
  if (!problem.scale.empty())
    for (std::size_t i = 0; i < n; ++i) inv_scale[i] = 1.0 / problem.scale[i];

  std::vector<double> mid(n), f_mid(n), res(n), probe(n), f_probe(n), rhs(n), delta(n), tmp(n);

  // R(x1) = x1 - x0 - dt F(mid), returned in scaled form.
  auto evaluate = [&] {
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (x0[i] + x1[i]);
    problem.rhs(mid, f_mid);
    for (std::size_t i = 0; i < n; ++i) res[i] = (x1[i] - x0[i] - dt * f_mid[i]) * inv_scale[i];
    return rms(res);
  };

  std::copy(x0.begin(), x0.end(), x1.begin());
  SolverStats stats;
  const double r0 = evaluate();
  stats.tolerance = std::max(solver.newton_abs_tol, solver.newton_rel_tol * r0);
  stats.final_residual_norm = r0;

  // Scaled Jacobian action: y -> W J W^-1 y, J y = y - dt dF(mid)[y] / 2 by one-sided differences.
  const LinearMap jacobian = [&](std::span<const double> y, std::span<double> out) {
    const double ynorm = rms(y);
    if (ynorm == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    double mid_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) mid_norm += (mid[i] * inv_scale[i]) * (mid[i] * inv_scale[i]);
    mid_norm = std::sqrt(mid_norm / static_cast<double>(n));
    const double eps = solver.jacobian_fd_epsilon * (1.0 + mid_norm) / ynorm;
    for (std::size_t i = 0; i < n; ++i) probe[i] = mid[i] + 0.5 * eps * y[i] / inv_scale[i];
    problem.rhs(probe, f_probe);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = y[i] - dt * (f_probe[i] - f_mid[i]) / eps * inv_scale[i];
  };

  LinearMap precondition;
  if (problem.precondition) {
    precondition = [&](std::span<const double> y, std::span<double> out) {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] / inv_scale[i];
      problem.precondition(tmp, out);
      for (std::size_t i = 0; i < n; ++i) out[i] *= inv_scale[i];
    };
  }

  GmresOptions gopts;
  gopts.rel_tol = solver.linear_rel_tol;
  gopts.max_iters = solver.linear_max_iters;
  gopts.restart = solver.linear_restart;

  for (int it = 0; it < solver.newton_max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -res[i];
    std::fill(delta.begin(), delta.end(), 0.0);
    const GmresResult lin = gmres(jacobian, problem.precondition ? &precondition : nullptr, rhs, delta, gopts);
    stats.linear_iterations_total += lin.iterations;

    for (std::size_t i = 0; i < n; ++i) x1[i] += delta[i] / inv_scale[i];
    if (problem.accept) problem.accept(x0, x1);
    ++stats.newton_iterations;
    stats.final_residual_norm = evaluate();
    if (!std::isfinite(stats.final_residual_norm)) break;
    if (stats.final_residual_norm <= stats.tolerance) {
      stats.converged = true;
      return stats;
    }
  }
  throw NewtonError("implicit midpoint: Newton did not converge (residual " +
                        format_double(stats.final_residual_norm) + ", tolerance " +
                        format_double(stats.tolerance) + ")",
                    stats);
}

std::vector<double> residual_scales(const Fields& layout, const PhysicalConstants& c) {
  Fields scales(layout.nx(), layout.nz());
  std::fill(scales.u().begin(), scales.u().end(), c.u0);
  std::fill(scales.w().begin(), scales.w().end(), c.u0);
  std::fill(scales.v().begin(), scales.v().end(), c.u0);
  std::fill(scales.theta().begin(), scales.theta().end(), c.theta0);
  std::fill(scales.rho().begin(), scales.rho().end(), c.rho_ref());
  return {scales.data().begin(), scales.data().end()};
}

// Column unknown ordering: D_k -> 3k, theta_k -> 3k + 1, w_{k+1} -> 3k + 2.
namespace {

// Forward and back substitution with a dgbtrf factorisation (single right-hand
// side). Equivalent to dgbtrs but without per-column BLAS call overhead, which
// dominates for these short bands.
void band_solve(const double* ab, const lapack_int* piv, int n, int kl, int ku, int ldab,
                double* b) {
  const int kv = kl + ku;
  auto at = [&](int row, int col) { return ab[static_cast<std::size_t>(kv + row - col) +
                                              static_cast<std::size_t>(col) * ldab]; };
  for (int j = 0; j < n - 1; ++j) {
    const int p = piv[j] - 1;
    if (p != j) std::swap(b[p], b[j]);
    const int lm = std::min(kl, n - 1 - j);
    const double bj = b[j];
    for (int i = 1; i <= lm; ++i) b[j + i] -= bj * at(j + i, j);
  }
  for (int j = n - 1; j >= 0; --j) {
    b[j] /= at(j, j);
    const double bj = b[j];
    for (int i = std::max(0, j - kv); i < j; ++i) b[i] -= bj * at(i, j);
  }
}

}  // namespace

ColumnPreconditioner::ColumnPreconditioner(const Fields& reference, const Grid& grid,
                                           const PhysicalConstants& c, double dt)
    : nx_(grid.nx), nz_(grid.nz), n_(3 * grid.nz - 1) {
  constexpr int kl = 3, ku = 3;
  ldab_ = 2 * kl + ku + 1;
  bands_.assign(static_cast<std::size_t>(ldab_) * n_ * nx_, 0.0);
  pivots_.assign(static_cast<std::size_t>(n_) * nx_, 0);

  const int nz = nz_;
  const double idz = 1.0 / grid.dz;
  const double half_dt = 0.5 * dt;
  const auto rho = reference.rho();
  const auto th = reference.theta();
  const auto w = reference.w();

  auto iD = [](int k) { return 3 * k; };
  auto iT = [](int k) { return 3 * k + 1; };
  auto iW = [](int j) { return 3 * j - 1; };  // face j = 1 .. nz - 1

  std::vector<ExnerEval> ex(nz);
  for (int col = 0; col < nx_; ++col) {
    double* ab = bands_.data() + static_cast<std::size_t>(ldab_) * n_ * col;
    auto A = [&](int row, int colj) -> double& {
      return ab[static_cast<std::size_t>(kl + ku + row - colj) + static_cast<std::size_t>(colj) * ldab_];
    };
    // A = I - (dt/2) L; add_L accumulates -(dt/2) * entry.
    auto add_L = [&](int row, int colj, double value) { A(row, colj) -= half_dt * value; };
    for (int r = 0; r < n_; ++r) A(r, r) = 1.0;

    const std::size_t base = static_cast<std::size_t>(col) * nz;
    for (int k = 0; k < nz; ++k) ex[k] = exner_partials(rho[base + k], th[base + k], c);

    for (int j = 1; j < nz; ++j) {
      const double tf = 0.5 * (th[base + j - 1] + th[base + j]);
      const double dpi = (ex[j].pi - ex[j - 1].pi) * idz;
      const int row = iW(j);
      add_L(row, iD(j), -c.cp * tf * ex[j].dpi_drho * idz);
      add_L(row, iD(j - 1), c.cp * tf * ex[j - 1].dpi_drho * idz);
      add_L(row, iT(j), -c.cp * (tf * ex[j].dpi_dtheta * idz + 0.5 * dpi));
      add_L(row, iT(j - 1), -c.cp * (-tf * ex[j - 1].dpi_dtheta * idz + 0.5 * dpi));
    }
    const std::size_t wbase = static_cast<std::size_t>(col) * (nz + 1);
    for (int k = 0; k < nz; ++k) {
      const int row = iD(k);
      if (k + 1 <= nz - 1) {
        const double df = 0.5 * (rho[base + k] + rho[base + k + 1]);
        const double wt = w[wbase + k + 1];
        add_L(row, iW(k + 1), -df * idz);
        add_L(row, iD(k), -0.5 * wt * idz);
        add_L(row, iD(k + 1), -0.5 * wt * idz);
      }
      if (k >= 1) {
        const double df = 0.5 * (rho[base + k - 1] + rho[base + k]);
        const double wb = w[wbase + k];
        add_L(row, iW(k), df * idz);
        add_L(row, iD(k - 1), 0.5 * wb * idz);
        add_L(row, iD(k), 0.5 * wb * idz);
      }
      double dthdz;
      if (k == 0) {
        dthdz = (th[base + 1] - th[base]) * idz;
      } else if (k == nz - 1) {
        dthdz = (th[base + k] - th[base + k - 1]) * idz;
      } else {
        dthdz = 0.5 * (th[base + k + 1] - th[base + k - 1]) * idz;
      }
      if (k >= 1) add_L(iT(k), iW(k), -0.5 * dthdz);
      if (k + 1 <= nz - 1) add_L(iT(k), iW(k + 1), -0.5 * dthdz);
    }

    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl, ku, ab, ldab_,
                                           pivots_.data() + static_cast<std::size_t>(n_) * col);
    if (info != 0)
      throw SolverError("column preconditioner: singular block in column " + std::to_string(col));
  }
}

void ColumnPreconditioner::apply(std::span<const double> in, std::span<double> out) const {
  constexpr int kl = 3, ku = 3;
  const int nz = nz_;
  const std::size_t cells = static_cast<std::size_t>(nx_) * nz;
  const std::size_t w_off = cells;
  const std::size_t v_off = w_off + static_cast<std::size_t>(nx_) * (nz + 1);
  const std::size_t th_off = v_off + cells;
  const std::size_t rho_off = th_off + cells;

  std::copy(in.begin(), in.end(), out.begin());
  std::vector<double> b(n_);
  for (int col = 0; col < nx_; ++col) {
    const std::size_t base = static_cast<std::size_t>(col) * nz;
    const std::size_t wbase = static_cast<std::size_t>(col) * (nz + 1);
    for (int k = 0; k < nz; ++k) {
      b[3 * k] = in[rho_off + base + k];
      b[3 * k + 1] = in[th_off + base + k];
      if (k + 1 < nz) b[3 * k + 2] = in[w_off + wbase + k + 1];
    }
    band_solve(bands_.data() + static_cast<std::size_t>(ldab_) * n_ * col,
               pivots_.data() + static_cast<std::size_t>(n_) * col, n_, kl, ku, ldab_, b.data());
    for (int k = 0; k < nz; ++k) {
      out[rho_off + base + k] = b[3 * k];
      out[th_off + base + k] = b[3 * k + 1];
      if (k + 1 < nz) out[w_off + wbase + k + 1] = b[3 * k + 2];
    }
    out[w_off + wbase] = in[w_off + wbase];
    out[w_off + wbase + nz] = in[w_off + wbase + nz];
  }
}

double acoustic_courant(const Fields& state, const Grid& grid, const PhysicalConstants& c, double dt) {
  const auto pi = exner_field(state, c);
  const auto th = state.theta();
  const double inv_h = std::sqrt(1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dz * grid.dz));
  double cmax = 0.0;
  for (std::size_t n = 0; n < pi.size(); ++n)
    cmax = std::max(cmax, std::sqrt(c.cp * c.R * pi[n] * th[n] / c.cv()));
  return cmax * std::abs(dt) * inv_h;
}

void step_ssprk3(State& state, double dt, const Grid& grid, const PhysicalConstants& c,
                 const DynamicsOptions& opts, double cfl_max) {
  const double courant = acoustic_courant(state, grid, c, dt);
  if (courant > cfl_max)
    throw ConfigError("dt", "acoustic Courant number " + format_double(courant) +
                                " exceeds cap " + format_double(cfl_max));

  const std::size_t n = state.size();
  Fields stage(state.nx(), state.nz());
  Fields rate(state.nx(), state.nz());
  auto s0 = state.data();
  auto s1 = stage.data();
  auto f = rate.data();

  tendencies(state, grid, c, opts, rate);
  for (std::size_t i = 0; i < n; ++i) s1[i] = s0[i] + dt * f[i];
  zero_boundary_w(stage);

  tendencies(stage, grid, c, opts, rate);
  for (std::size_t i = 0; i < n; ++i) s1[i] = 0.75 * s0[i] + 0.25 * (s1[i] + dt * f[i]);
  zero_boundary_w(stage);

  tendencies(stage, grid, c, opts, rate);
  for (std::size_t i = 0; i < n; ++i) s0[i] = s0[i] / 3.0 + 2.0 / 3.0 * (s1[i] + dt * f[i]);
  zero_boundary_w(state);
  state.t += dt;
}

SolverStats step_implicit_midpoint(State& state, double dt, const Grid& grid,
                                   const PhysicalConstants& c, const DynamicsOptions& opts,
                                   const SolverConfig& solver) {
  const auto scales = residual_scales(state, c);
  Fields work(state.nx(), state.nz());
  Fields rate(state.nx(), state.nz());

  MidpointProblem problem;
  problem.rhs = [&](std::span<const double> x, std::span<double> out) {
    std::copy(x.begin(), x.end(), work.data().begin());
    tendencies(work, grid, c, opts, rate);
    std::copy(rate.data().begin(), rate.data().end(), out.begin());
  };
  problem.scale = scales;

  std::optional<ColumnPreconditioner> column;
  if (solver.preconditioner == Preconditioner::kColumn) {
    column.emplace(state, grid, c, dt);
    problem.precondition = [&column](std::span<const double> in, std::span<double> out) {
      column->apply(in, out);
    };
  }

  // Total mass is linear in the iterate and exactly conserved by the solution,
  // so each iterate is shifted onto that hyperplane. Positivity is enforced here.
  const std::size_t cells = state.cells();
  const std::size_t rho_off = state.size() - cells;
  const std::size_t th_off = rho_off - cells;
  problem.accept = [&](std::span<const double> x0, std::span<double> x1) {
    double mass0 = 0.0, mass1 = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      mass0 += x0[rho_off + i];
      mass1 += x1[rho_off + i];
    }
    const double shift = (mass0 - mass1) / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      x1[rho_off + i] += shift;
      if (!(x1[rho_off + i] > 0.0) || !(x1[th_off + i] > 0.0))
        throw SolverError("implicit midpoint: non-positive density or theta at Newton iterate");
    }
  };

  State next(state.nx(), state.nz());
  const SolverStats stats = solve_implicit_midpoint(problem, state.data(), dt, solver, next.data());
  std::copy(next.data().begin(), next.data().end(), state.data().begin());
  zero_boundary_w(state);
  state.t += dt;
  return stats;
}

Stepper::Stepper(const RunConfig& config, const Grid& grid)
    : config_(config), grid_(grid), opts_(dynamics_options(config)) {}

SolverStats Stepper::step(State& state) const {
  if (config_.integrator == Integrator::kSsprk3) {
    step_ssprk3(state, config_.dt, grid_, config_.constants, opts_, config_.cfl_max);
    SolverStats s;
    s.converged = true;
    return s;
  }
  return step_implicit_midpoint(state, config_.dt, grid_, config_.constants, opts_, config_.solver);
}

}  // namespace eady
