#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace qhelly {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Volume of the d-dimensional unit ball, pi^(d/2) / Gamma(d/2 + 1).
inline double unit_ball_volume(int d) {
  return std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0));
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

// Orthonormal basis (as columns) of the orthogonal complement of a unit vector.
inline Matrix orthogonal_complement(const Vector& normal) {
  const auto d = normal.size();
  Matrix m(d, 1);
  m.col(0) = normal;
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - 1);
}

// Numerical null space of `m` (columns of the result), via full SVD.
inline Matrix null_space(const Matrix& m, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = s.size() > 0 ? std::max(s(0), 1.0) : 1.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * scale) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

inline Eigen::Index matrix_rank(const Matrix& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double scale = std::max(s(0), 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * scale) ++rank;
  return rank;
}

// Symmetric square root of a symmetric positive semidefinite matrix.
inline Matrix sym_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// d+1 unit vectors in R^d summing to the origin (vertices of a regular simplex).
inline std::vector<Vector> regular_simplex(int d) {
  const int n = d + 1;
  Matrix centered = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Matrix ones = Matrix::Constant(n, 1, 1.0 / std::sqrt(double(n)));
  Eigen::HouseholderQR<Matrix> qr(ones);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix basis = q.rightCols(d);  // orthonormal basis of 1-perp
  std::vector<Vector> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    Vector p = basis.transpose() * centered.col(j);
    out.push_back(p / p.norm());
  }
  return out;
}

}  // namespace qhelly
