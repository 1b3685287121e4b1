#pragma once

#include <functional>
#include <span>

namespace eady {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct GmresOptions {
  double rel_tol = 1.0e-4;
  double abs_tol = 0.0;
  int max_iters = 200;
  int restart = 30;
};

struct GmresResult {
  int iterations = 0;
  double initial_residual = 0.0;
  double residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with right preconditioning, so the monitored residual is
/// ||b - A x||_2 itself (the Arnoldi estimate within a cycle, recomputed at
/// each restart). Stops when it falls below max(abs_tol, rel_tol ||b||).
/// `x` holds the initial guess on entry. A null `precondition` means identity.
GmresResult gmres(const LinearMap& apply, const LinearMap* precondition,
                  std::span<const double> b, std::span<double> x, const GmresOptions& opts);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace eady
