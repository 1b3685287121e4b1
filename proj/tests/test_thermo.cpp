#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "eady/errors.hpp"
#include "eady/thermo.hpp"

using namespace eady;

namespace {

// Solves Pi^(cp/R) p0 = D R theta Pi for Pi > 0 by bisection.
double exner_bisection(double rho, double theta, const PhysicalConstants& c) {
  auto f = [&](double pi) { return std::pow(pi, c.cp / c.R) * c.p0 - rho * c.R * theta * pi; };
  double lo = 1e-6;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("reference point") {
  const PhysicalConstants c;
  const double rho = c.p0 / (c.R * 300.0);
  CHECK(exner(rho, 300.0, c) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exner(1.1614, 300.0, c) == doctest::Approx(1.0000).epsilon(5e-5));
}

TEST_CASE("closure matches an independent root solve") {
  const PhysicalConstants c;
  for (double rho : {0.1, 0.5, 1.1614, 2.0})
    for (double theta : {200.0, 300.0, 400.0})
      CHECK(exner(rho, theta, c) == doctest::Approx(exner_bisection(rho, theta, c)).epsilon(1e-12));
}

TEST_CASE("halving density scales Pi by 2^(-R/cv)") {
  const PhysicalConstants c;
  const double ratio = exner(0.6, 290.0, c) / exner(1.2, 290.0, c);
  CHECK(ratio == doctest::Approx(std::pow(2.0, -c.R / c.cv())).epsilon(1e-14));
  CHECK(ratio == doctest::Approx(0.7578).epsilon(1e-4));
}

TEST_CASE("partials") {
  const PhysicalConstants c;
  const ExnerEval e = exner_partials(1.1614, 300.0, c);
  CHECK(e.dpi_drho == doctest::Approx(0.3444).epsilon(1e-3));
  CHECK(e.dpi_dtheta == doctest::Approx(1.3333e-3).epsilon(1e-3));
  CHECK(1.1614 * e.dpi_drho == doctest::Approx(300.0 * e.dpi_dtheta).epsilon(1e-14));
}

TEST_CASE("partials match centred differences over a logarithmic sweep") {
  const PhysicalConstants c;
  for (int a = 0; a <= 10; ++a) {
    const double rho = 0.1 * std::pow(20.0, a / 10.0);
    for (int b = 0; b <= 10; ++b) {
      const double theta = 200.0 * std::pow(2.0, b / 10.0);
      const ExnerEval e = exner_partials(rho, theta, c);
      const double hr = 1e-5 * rho;
      const double ht = 1e-5 * theta;
      const double fd_r = (exner(rho + hr, theta, c) - exner(rho - hr, theta, c)) / (2.0 * hr);
      const double fd_t = (exner(rho, theta + ht, c) - exner(rho, theta - ht, c)) / (2.0 * ht);
      CHECK(std::abs(e.dpi_drho - fd_r) / e.dpi_drho < 1e-6);
      CHECK(std::abs(e.dpi_dtheta - fd_t) / e.dpi_dtheta < 1e-6);
      CHECK(e.pi == exner(rho, theta, c));
    }
  }
}

TEST_CASE("density_from_exner") {
  const PhysicalConstants c;
  CHECK(density_from_exner(1.0, 300.0, c) == doctest::Approx(c.p0 / (c.R * 300.0)).epsilon(1e-14));
  CHECK(density_from_exner(1.0, 300.0, c) == doctest::Approx(1.1614).epsilon(1e-4));
  const double d = density_from_exner(0.864, 300.0, c);
  CHECK(exner_bisection(d, 300.0, c) == doctest::Approx(0.864).epsilon(1e-12));
  CHECK(d == doctest::Approx(0.8059001).epsilon(1e-6));
  CHECK(exner(density_from_exner(0.93, 287.0, c), 287.0, c) == doctest::Approx(0.93).epsilon(1e-12));
}

TEST_CASE("round trip over random admissible inputs") {
  const PhysicalConstants c;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> log_rho(std::log(0.05), std::log(3.0));
  std::uniform_real_distribution<double> theta_dist(150.0, 450.0);
  for (int n = 0; n < 100; ++n) {
    const double rho = std::exp(log_rho(rng));
    const double theta = theta_dist(rng);
    const double back = density_from_exner(exner(rho, theta, c), theta, c);
    CHECK(std::abs(back - rho) / rho < 1e-12);
  }
}

TEST_CASE("monotone in each argument") {
  const PhysicalConstants c;
  double prev = 0.0;
  for (double rho = 0.1; rho < 2.0; rho += 0.05) {
    const double pi = exner(rho, 300.0, c);
    CHECK(pi > prev);
    prev = pi;
  }
  prev = 0.0;
  for (double theta = 200.0; theta < 400.0; theta += 5.0) {
    const double pi = exner(1.0, theta, c);
    CHECK(pi > prev);
    prev = pi;
  }
}

TEST_CASE("non-physical inputs raise") {
  const PhysicalConstants c;
  CHECK_THROWS_AS(exner(0.0, 300.0, c), DomainError);
  CHECK_THROWS_AS(exner(1.0, -1.0, c), DomainError);
  CHECK_THROWS_AS(exner_partials(-1.0, 300.0, c), DomainError);
  CHECK_THROWS_AS(density_from_exner(0.0, 300.0, c), DomainError);
  CHECK_THROWS_AS(density_from_exner(1.0, 0.0, c), DomainError);
}
