#pragma once

namespace eady {

/// Dimensional constants of the compressible Eady slice, SI units.
///
/// `n2` is the squared Brunt-Vaisala frequency in s^-2. `shear` is the
/// background vertical shear Lambda. `u0` is the representative velocity used
/// for the Rossby/Froude numbers and for nondimensionalising solver residuals.
struct PhysicalConstants {
  double L = 1.0e6;        // half-width of the channel, m
  double H = 1.0e4;        // depth, m
  double f = 1.0e-4;       // Coriolis parameter, s^-1
  double g = 10.0;         // m s^-2
  double p0 = 1.0e5;       // Pa
  double theta0 = 300.0;   // K
  double shear = 1.0e-3;   // s^-1
  double n2 = 2.5e-5;      // s^-2
  double pi0 = 0.864;      // Exner offset in the slice forcing terms
  double R = 287.0;        // J kg^-1 K^-1
  double cp = 1004.5;      // J kg^-1 K^-1
  double u0 = 5.0;         // m s^-1

  double cv() const { return cp - R; }
  /// y-gradient of the background potential temperature, K m^-1.
  double s() const { return -theta0 * f * shear / g; }
  double brunt_vaisala() const;
  double rossby() const { return u0 / (f * L); }
  double froude() const;
  double burger() const { return rossby() / froude(); }
  /// Reference density p0 / (R theta0).
  double rho_ref() const { return p0 / (R * theta0); }
};

PhysicalConstants default_constants();

/// Throws ConfigError if any constant is non-physical.
void validate_constants(const PhysicalConstants& c);

}  // namespace eady
