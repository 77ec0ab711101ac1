#pragma once

#include "qhelly/linalg.hpp"

#include <limits>
#include <vector>

namespace qhelly {

struct NnlsResult {
  Vector x;
  double residual_norm = 0.0;
  int iterations = 0;
};

// Lawson-Hanson active-set solver for min |A x - b| subject to x >= 0.
inline NnlsResult nnls(const Matrix& a, const Vector& b, double tol = 1e-12, int max_iter = 0) {
  const Eigen::Index n = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(5 * n + 50);
  Vector x = Vector::Zero(n);
  std::vector<bool> passive(n, false);

  auto solve_passive = [&](Vector& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    Vector zs = sub.colPivHouseholderQr().solve(b);
    z = Vector::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zs(static_cast<Eigen::Index>(k));
  };

  int iter = 0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
  while (iter < max_iter) {
    Vector grad = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_val = tol * scale;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && grad(j) > best_val) {
        best_val = grad(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;

    // Inner loop: keep the passive solution feasible.
    for (;;) {
      ++iter;
      Vector z;
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x(j) <= tol) {
          passive[j] = false;
          x(j) = 0.0;
        }
      }
      if (iter >= max_iter) break;
    }
  }
  return {x, (a * x - b).norm(), iter};
}

}  // namespace qhelly
