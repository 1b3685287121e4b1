#pragma once

#include <span>
#include <vector>

#include "eady/config.hpp"
#include "eady/grid.hpp"
#include "eady/state.hpp"

namespace eady {

/// Spatial discretisation switches.
///
/// scalar_order: 1 and 3 select first- and third-order upwind-biased stencils
/// for theta and v; 2 selects centred differences. momentum_upwind selects
/// first-order upwinding (true) or centred differences (false) for the
/// advective momentum form. The vector-invariant form is always centred.
struct DynamicsOptions {
  VelocityForm form = VelocityForm::kAdvective;
  int scalar_order = 3;
  bool momentum_upwind = true;
  /// Multiplies the slice forcing terms cp s (Pi - Pi0) and -v s. Exposed so
  /// tests can recover the plain 2D slice.
  bool slice_forcing = true;
};

DynamicsOptions dynamics_options(const RunConfig& config);

/// Exner pressure at every centre. Throws DomainError for D <= 0 or theta <= 0.
std::vector<double> exner_field(const Fields& state, const PhysicalConstants& c);

/// Advective operator (u . grad) phi at centres, written into `out`.
///
/// Evaluated as (div(F phi_f) - phi div F) / D with mass fluxes F = D_f u on
/// faces, so the centred part cancels against flux-form continuity. Face values
/// are donor-cell (order 1), arithmetic mean (order 2) or third-order
/// upwind-biased (order 3); faces next to the walls fall back to donor cell.
/// An empty `rho` means unit density.
void advect_scalar(std::span<const double> phi, std::span<const double> u, std::span<const double> w,
                   std::span<const double> rho, const Grid& grid, int order, std::span<double> out);
void advect_scalar(std::span<const double> phi, std::span<const double> u, std::span<const double> w,
                   const Grid& grid, int order, std::span<double> out);

/// (u . grad) u at x-faces and (u . grad) w at interior z-faces (boundary rows
/// left at zero). First-order upwind when `upwind`, centred otherwise.
void velocity_advection_advective(const Fields& state, const Grid& grid, bool upwind,
                                  std::span<double> adv_u, std::span<double> adv_w);

/// eta y-hat x u + grad(|u|^2 / 2) with eta = du/dz - dw/dx at cell corners.
void velocity_advection_vector_invariant(const Fields& state, const Grid& grid,
                                         std::span<double> adv_u, std::span<double> adv_w);

/// Full semi-discrete right-hand side.
void tendencies(const Fields& state, const Grid& grid, const PhysicalConstants& c,
                const DynamicsOptions& opts, Fields& out);
Tendency tendencies(const State& state, const Grid& grid, const PhysicalConstants& c,
                    const DynamicsOptions& opts);

}  // namespace eady
