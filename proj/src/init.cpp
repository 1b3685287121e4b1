#include "eady/init.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eady/errors.hpp"
#include "eady/thermo.hpp"

namespace eady {

NormalModeParams normal_mode_params(double amplitude, const PhysicalConstants& c) {
  NormalModeParams p;
  p.a = amplitude;
  p.bu = c.burger();
  p.n = mode_constant(p.bu);
  p.H = c.H;
  return p;
}

double background_theta(double z, const PhysicalConstants& c) {
  return c.theta0 * std::exp(c.n2 * (z - 0.5 * c.H) / c.g);
}

double background_exner(double z, double surface_exner, const PhysicalConstants& c) {
  // d(Pi)/dz = -g / (cp theta0 exp(N^2 (z - H/2) / g)), integrated from 0.
  const double scale = c.g * c.g / (c.cp * c.theta0 * c.n2);
  const double e0 = std::exp(c.n2 * 0.5 * c.H / c.g);
  return surface_exner - scale * e0 * (-std::expm1(-c.n2 * z / c.g));
}

double mode_constant(double bu) {
  if (!(bu > 0.0) || !std::isfinite(bu)) throw DomainError("Burger number must be positive");
  const double x = 0.5 * bu;
  // x - tanh x loses every digit for small x; use its Taylor series there.
  double x_minus_tanh;
  if (x < 1.0e-2) {
    const double x2 = x * x;
    x_minus_tanh = x * x2 * (1.0 / 3.0 - x2 * (2.0 / 15.0 - x2 * 17.0 / 315.0));
  } else {
    x_minus_tanh = x - std::tanh(x);
  }
  const double coth_minus_x = 1.0 / std::tanh(x) - x;
  if (!(coth_minus_x > 0.0)) throw DomainError("Burger number beyond the short-wave cutoff: no growing mode");
  return std::sqrt(x_minus_tanh * coth_minus_x) / bu;
}

std::vector<double> perturbed_theta(const Grid& grid, const NormalModeParams& mode,
                                    const PhysicalConstants& c) {
  const double amp = c.theta0 * mode.a * c.brunt_vaisala() / c.g;
  const double half = 0.5 * mode.bu;
  const double sinh_coef = -(1.0 - half / std::tanh(half));
  const double cosh_coef = -mode.n * mode.bu;

  std::vector<double> theta(static_cast<std::size_t>(grid.nx) * grid.nz);
  for (int i = 0; i < grid.nx; ++i) {
    const double phase = M_PI * grid.xc[i] / c.L;
    for (int k = 0; k < grid.nz; ++k) {
      const double Z = mode.Z(grid.zc[k]);
      const double bracket =
          sinh_coef * std::sinh(Z) * std::cos(phase) + cosh_coef * std::cosh(Z) * std::sin(phase);
      theta[static_cast<std::size_t>(i) * grid.nz + k] = background_theta(grid.zc[k], c) + amp * bracket;
    }
  }
  return theta;
}

namespace {

struct ColumnResidual {
  std::vector<double> r;  // scaled by 1/g
  double max_abs = 0.0;
};

// Equation 0 is the anchor (floor) or the lid condition; equation k >= 1 is the
// balance on interior face k.
void column_residual(std::span<const double> theta, std::span<const double> rho, double dz,
                     const PhysicalConstants& c, const HydrostaticOptions& opts, double anchor_pi,
                     std::vector<double>& pi, ColumnResidual& out) {
  const int nz = static_cast<int>(theta.size());
  for (int k = 0; k < nz; ++k) pi[k] = exner(rho[k], theta[k], c);
  out.r.assign(nz, 0.0);
  if (opts.anchor == HydrostaticAnchor::kSurface) {
    out.r[0] = (c.cp * theta[0] * (pi[0] - anchor_pi) / (0.5 * dz) + c.g) / c.g;
  } else {
    out.r[0] = (c.cp * theta[nz - 1] * (anchor_pi - pi[nz - 1]) / (0.5 * dz) + c.g) / c.g;
  }
  for (int k = 1; k < nz; ++k) {
    const double tf = 0.5 * (theta[k - 1] + theta[k]);
    out.r[k] = (c.cp * tf * (pi[k] - pi[k - 1]) / dz + c.g) / c.g;
  }
  out.max_abs = 0.0;
  for (double v : out.r) out.max_abs = std::max(out.max_abs, std::abs(v));
}

}  // namespace

HydrostaticColumnReport solve_hydrostatic_column(std::span<const double> theta, double dz,
                                                 const PhysicalConstants& c,
                                                 const HydrostaticOptions& opts,
                                                 std::span<double> rho) {
  const int nz = static_cast<int>(theta.size());
  const double anchor_pi = opts.anchor == HydrostaticAnchor::kSurface
                               ? opts.anchor_exner
                               : background_exner(nz * dz, opts.anchor_exner, c);

  // Initial guess: background Exner profile mapped through the closure.
  for (int k = 0; k < nz; ++k) {
    const double pi_guess = background_exner((k + 0.5) * dz, opts.anchor_exner, c);
    if (!(pi_guess > 0.0)) throw SolverError("hydrostatic balance: background Exner non-positive");
    rho[k] = density_from_exner(pi_guess, theta[k], c);
  }

  HydrostaticColumnReport report;
  std::vector<double> pi(nz), dpi(nz), delta(nz), trial(nz), pi_trial(nz);
  ColumnResidual res, res_trial;
  column_residual(theta, rho, dz, c, opts, anchor_pi, pi, res);
  report.residual_history.push_back(res.max_abs);

  while (res.max_abs > opts.tolerance) {
    if (report.iterations >= opts.max_iterations)
      throw SolverError("hydrostatic balance: Newton did not converge");

    for (int k = 0; k < nz; ++k) dpi[k] = exner_partials(rho[k], theta[k], c).dpi_drho;

    // The Jacobian is bidiagonal; solve by substitution from the anchored end.
    const double s_half = c.cp / (0.5 * dz * c.g);
    const double s_face = c.cp / (dz * c.g);
    if (opts.anchor == HydrostaticAnchor::kSurface) {
      delta[0] = -res.r[0] / (s_half * theta[0] * dpi[0]);
      for (int k = 1; k < nz; ++k) {
        const double tf = 0.5 * (theta[k - 1] + theta[k]);
        const double a = s_face * tf * dpi[k];
        const double b = -s_face * tf * dpi[k - 1];
        delta[k] = (-res.r[k] - b * delta[k - 1]) / a;
      }
    } else {
      delta[nz - 1] = -res.r[0] / (-s_half * theta[nz - 1] * dpi[nz - 1]);
      for (int k = nz - 1; k >= 1; --k) {
        const double tf = 0.5 * (theta[k - 1] + theta[k]);
        const double a = s_face * tf * dpi[k];
        const double b = -s_face * tf * dpi[k - 1];
        delta[k - 1] = (-res.r[k] - a * delta[k]) / b;
      }
    }

    // Damped update: halve while the step leaves D <= 0 or raises the residual.
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, lambda *= 0.5) {
      bool positive = true;
      for (int k = 0; k < nz; ++k) {
        trial[k] = rho[k] + lambda * delta[k];
        positive = positive && trial[k] > 0.0 && std::isfinite(trial[k]);
      }
      if (!positive) continue;
      column_residual(theta, trial, dz, c, opts, anchor_pi, pi_trial, res_trial);
      if (res_trial.max_abs < res.max_abs || res_trial.max_abs <= opts.tolerance) {
        accepted = true;
        break;
      }
    }
    if (!accepted) throw SolverError("hydrostatic balance: damped Newton step rejected");
    std::copy(trial.begin(), trial.end(), rho.begin());
    res = res_trial;
    ++report.iterations;
    report.residual_history.push_back(res.max_abs);
  }
  return report;
}

std::vector<double> hydrostatic_density(std::span<const double> theta, const Grid& grid,
                                        const PhysicalConstants& c, const HydrostaticOptions& opts) {
  for (double t : theta)
    if (!(t > 0.0)) throw DomainError("hydrostatic balance: non-positive theta");
  std::vector<double> rho(theta.size());
  const std::size_t nz = grid.nz;
  for (int i = 0; i < grid.nx; ++i) {
    try {
      solve_hydrostatic_column(theta.subspan(i * nz, nz), grid.dz, c, opts,
                               std::span<double>(rho).subspan(i * nz, nz));
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (column " + std::to_string(i) + ")");
    }
  }
  return rho;
}

namespace {
std::vector<double> exner_field(std::span<const double> theta, std::span<const double> rho,
                                const PhysicalConstants& c) {
  std::vector<double> pi(theta.size());
  for (std::size_t n = 0; n < theta.size(); ++n) pi[n] = exner(rho[n], theta[n], c);
  return pi;
}
}  // namespace

std::vector<double> geostrophic_v(std::span<const double> theta, std::span<const double> rho,
                                  const Grid& grid, const PhysicalConstants& c) {
  const auto pi = exner_field(theta, rho, c);
  const std::size_t nz = grid.nz;
  std::vector<double> v(theta.size());
  for (int i = 0; i < grid.nx; ++i) {
    const std::size_t east = grid.wrap(i + 1) * nz;
    const std::size_t west = grid.wrap(i - 1) * nz;
    for (std::size_t k = 0; k < nz; ++k) {
      const double dpidx = (pi[east + k] - pi[west + k]) / (2.0 * grid.dx);
      v[i * nz + k] = c.cp * theta[i * nz + k] * dpidx / c.f;
    }
  }
  return v;
}

std::vector<double> initial_u(std::span<const double> theta, std::span<const double> rho,
                              const Grid& grid, const PhysicalConstants& c) {
  const auto pi = exner_field(theta, rho, c);
  const std::size_t nz = grid.nz;
  const double coef = c.cp * c.s() / c.f;
  std::vector<double> u(theta.size());
  for (int i = 0; i < grid.nx; ++i) {
    const std::size_t west = grid.wrap(i - 1) * nz;
    for (std::size_t k = 0; k < nz; ++k) {
      const double pi_face = 0.5 * (pi[west + k] + pi[i * nz + k]);
      u[i * nz + k] = coef * (pi_face - c.pi0);
    }
  }
  return u;
}

HydrostaticOptions hydrostatic_options(const RunConfig& config) {
  HydrostaticOptions opts;
  opts.anchor = config.anchor;
  opts.anchor_exner = config.anchor_exner;
  return opts;
}

State initial_state(const RunConfig& config, const Grid& grid) {
  const PhysicalConstants& c = config.constants;
  const auto theta = perturbed_theta(grid, normal_mode_params(config.amplitude, c), c);
  const auto rho = hydrostatic_density(theta, grid, c, hydrostatic_options(config));
  const auto v = geostrophic_v(theta, rho, grid, c);
  const auto u = initial_u(theta, rho, grid, c);

  State s(grid.nx, grid.nz);
  std::copy(theta.begin(), theta.end(), s.theta().begin());
  std::copy(rho.begin(), rho.end(), s.rho().begin());
  std::copy(v.begin(), v.end(), s.v().begin());
  std::copy(u.begin(), u.end(), s.u().begin());
  s.t = 0.0;
  return s;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

BreedResult breed(State& state, const RunConfig& config, const std::function<void(State&)>& step) {
  const double t_limit = state.t + config.breed_max_days * 86400.0;
  const double t_start = state.t;
  BreedResult result;
  while (true) {
    step(state);
    ++result.steps;
    result.max_v = max_abs(state.v());
    if (result.max_v >= config.breed_vmax) break;
    if (state.t >= t_limit - 0.5 * config.dt)
      throw SolverError("breeding: max|v| did not reach " + format_double(config.breed_vmax) +
                        " m/s within " + format_double(config.breed_max_days) + " days");
  }
  result.t_breed = state.t - t_start;
  state.t = 0.0;
  return result;
}

}  // namespace eady
