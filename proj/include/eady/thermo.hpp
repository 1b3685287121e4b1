#pragma once

#include <cmath>

#include "eady/constants.hpp"

namespace eady {

/// Exner pressure and its partial derivatives at one point.
struct ExnerEval {
  double pi = 0.0;
  double dpi_drho = 0.0;    // m^3 kg^-1
  double dpi_dtheta = 0.0;  // K^-1
};

/// Exner pressure from density and slice potential temperature.
///
/// Eliminating T = theta * Pi from p = D R T and Pi = (p / p0)^(R / cp) gives
/// Pi = (D R theta / p0)^(R / cv). Throws DomainError unless rho, theta > 0.
double exner(double rho, double theta, const PhysicalConstants& c);

/// Pi together with dPi/dD = (R / (cv D)) Pi and dPi/dtheta = (R / (cv theta)) Pi.
ExnerEval exner_partials(double rho, double theta, const PhysicalConstants& c);

/// Inverse of exner() in the density argument: D = p0 Pi^(cv / R) / (R theta).
double density_from_exner(double pi, double theta, const PhysicalConstants& c);

/// Same closure without argument checks, for inner loops that validated upstream.
inline double exner_unchecked(double rho, double theta, double r_over_p0, double kappa_v) {
  return std::pow(rho * theta * r_over_p0, kappa_v);
}

}  // namespace eady
