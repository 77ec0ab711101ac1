#pragma once

#include "qhelly/linalg.hpp"

#include <cstdint>
#include <random>

namespace qhelly {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; derives independent sub-seeds from (seed, stream).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) { return Rng(split_seed(seed, stream)); }

inline Vector random_gaussian(Rng& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = n(rng);
  return v;
}

// Uniform on the unit sphere.
inline Vector random_unit_vector(Rng& rng, int d) {
  for (;;) {
    Vector v = random_gaussian(rng, d);
    const double n = v.norm();
    if (n > 1e-8) return v / n;
  }
}

// Haar-distributed orthogonal matrix.
inline Matrix random_orthogonal(Rng& rng, int d) {
  Matrix g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = random_gaussian(rng, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

}  // namespace qhelly
