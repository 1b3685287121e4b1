#include "eady/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace eady {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

GmresResult gmres(const LinearMap& apply, const LinearMap* precondition,
                  std::span<const double> b, std::span<double> x, const GmresOptions& opts) {
  const std::size_t n = b.size();
  const int m = std::max(1, opts.restart);
  GmresResult result;

  // Basis vectors are allocated on first use; most solves need only a few.
  std::vector<std::vector<double>> V(1, std::vector<double>(n));
  std::vector<std::vector<double>> Z;
  std::vector<double> H(static_cast<std::size_t>(m + 1) * m, 0.0);
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);
  std::vector<double> r(n), tmp(n);
  auto h = [&H, m](int row, int col) -> double& { return H[static_cast<std::size_t>(row) * m + col]; };

  const double bnorm = norm2(b);
  const double target = std::max(opts.abs_tol, opts.rel_tol * bnorm);

  auto residual = [&] {
    apply(x, tmp);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
    return norm2(r);
  };

  double beta = residual();
  result.initial_residual = beta;
  result.residual = beta;
  if (beta <= target) {
    result.converged = true;
    return result;
  }

  while (result.iterations < opts.max_iters) {
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int j = 0;
    bool estimate_converged = false;
    for (; j < m && result.iterations < opts.max_iters; ++j) {
      if (static_cast<int>(V.size()) < j + 2) V.emplace_back(n);
      if (static_cast<int>(Z.size()) < j + 1) Z.emplace_back(n);
      if (precondition) {
        (*precondition)(V[j], Z[j]);
      } else {
        Z[j] = V[j];
      }
      apply(Z[j], V[j + 1]);
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i) {
        h(i, j) = dot(V[j + 1], V[i]);
        for (std::size_t q = 0; q < n; ++q) V[j + 1][q] -= h(i, j) * V[i][q];
      }
      h(j + 1, j) = norm2(V[j + 1]);
      if (h(j + 1, j) > 0.0)
        for (std::size_t q = 0; q < n; ++q) V[j + 1][q] /= h(j + 1, j);

      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[j] = denom > 0.0 ? h(j, j) / denom : 1.0;
      sn[j] = denom > 0.0 ? h(j + 1, j) / denom : 0.0;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      ++result.iterations;
      if (std::abs(g[j + 1]) <= target) {
        ++j;
        estimate_converged = true;
        break;
      }
    }

    // Back-substitute and update x += Z y.
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= h(i, k) * y[k];
      y[i] = h(i, i) != 0.0 ? s / h(i, i) : 0.0;
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t q = 0; q < n; ++q) x[q] += y[i] * Z[i][q];

    // The Arnoldi estimate is exact in exact arithmetic; only a restart needs
    // the true residual.
    if (estimate_converged) {
      result.residual = std::abs(g[j]);
      result.converged = true;
      break;
    }
    beta = residual();
    result.residual = beta;
    if (beta <= target) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace eady
