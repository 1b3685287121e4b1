#include "eady/constants.hpp"

#include <cmath>

#include "eady/errors.hpp"

namespace eady {

double PhysicalConstants::brunt_vaisala() const { return std::sqrt(n2); }

double PhysicalConstants::froude() const { return u0 / (brunt_vaisala() * H); }

PhysicalConstants default_constants() { return PhysicalConstants{}; }

void validate_constants(const PhysicalConstants& c) {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive and finite");
  };
  positive("L", c.L);
  positive("H", c.H);
  positive("f", c.f);
  positive("g", c.g);
  positive("p0", c.p0);
  positive("theta0", c.theta0);
  positive("n2", c.n2);
  positive("R", c.R);
  positive("cp", c.cp);
  positive("u0", c.u0);
  if (!std::isfinite(c.shear)) throw ConfigError("shear", "must be finite");
  if (!std::isfinite(c.pi0)) throw ConfigError("pi0", "must be finite");
  if (!(c.cv() > 0.0)) throw ConfigError("cp", "cp - R must be positive");
}

}  // namespace eady
