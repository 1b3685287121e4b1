#include "eady/thermo.hpp"

#include <cmath>
#include <string>

#include "eady/errors.hpp"

namespace eady {

namespace {
void check_positive(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string("non-positive ") + name + " in Exner closure: " + std::to_string(v));
}
}  // namespace

double exner(double rho, double theta, const PhysicalConstants& c) {
  check_positive("density", rho);
  check_positive("theta", theta);
  return std::pow(rho * c.R * theta / c.p0, c.R / c.cv());
}

ExnerEval exner_partials(double rho, double theta, const PhysicalConstants& c) {
  ExnerEval e;
  e.pi = exner(rho, theta, c);
  const double kappa_v = c.R / c.cv();
  e.dpi_drho = kappa_v * e.pi / rho;
  e.dpi_dtheta = kappa_v * e.pi / theta;
  return e;
}

double density_from_exner(double pi, double theta, const PhysicalConstants& c) {
  check_positive("Exner pressure", pi);
  check_positive("theta", theta);
  return c.p0 * std::pow(pi, c.cv() / c.R) / (c.R * theta);
}

}  // namespace eady
