#pragma once

#include "qhelly/config.hpp"
#include "qhelly/io.hpp"
#include "qhelly/polytope.hpp"
#include "qhelly/random.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qhelly {

// The 2d facets +-<e_i, x> <= 1.
inline InstanceDocument gen_cube(int d) {
  if (d < 1 || d > kMaxDim) throw Error(ErrorKind::CapExceeded, "cube dimension must be in [1, 8]");
  InstanceDocument doc;
  doc.dim = d;
  for (int i = 0; i < d; ++i) {
    for (double s : {1.0, -1.0}) {
      Vector a = Vector::Zero(d);
      a(i) = s;
      doc.halfspaces.push_back({a, 1.0});
    }
  }
  doc.meta = {{"generator", "cube"}, {"d", d}};
  return doc;
}

// m half-spaces <a_i, x> <= 1 with a_i uniform on the sphere, resampled until bounded.
inline InstanceDocument gen_tangent_random(int d, int m, std::uint64_t seed) {
  if (d < 1 || d > kMaxDim) throw Error(ErrorKind::CapExceeded, "dimension must be in [1, 8]");
  if (m > kMaxFacets) throw Error(ErrorKind::CapExceeded, "at most 64 half-spaces");
  if (m < d + 1) throw Error(ErrorKind::MalformedInput, "need m >= d + 1 for a bounded intersection");
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng = make_rng(seed, attempt);
    InstanceDocument doc;
    doc.dim = d;
    for (int i = 0; i < m; ++i) doc.halfspaces.push_back({random_unit_vector(rng, d), 1.0});
    if (is_bounded(doc.to_polytope())) {
      doc.meta = {{"generator", "tangent"}, {"d", d}, {"m", m}, {"seed", seed}};
      return doc;
    }
  }
  throw Error(ErrorKind::CapExceeded, "no bounded instance after 1000 attempts");
}

// Image of the instance under x -> linear x + offset.
inline InstanceDocument gen_affine_warp(const InstanceDocument& doc, const Matrix& linear, const Vector& offset) {
  const Matrix inv_t = linear.inverse().transpose();
  InstanceDocument out;
  out.dim = doc.dim;
  for (const auto& r : doc.halfspaces) {
    Vector a = inv_t * r.a;
    out.halfspaces.push_back({a, r.b + a.dot(offset)});
  }
  out.meta = doc.meta;
  return out;
}

// Random invertible affine map with singular values log-uniform in [1, 100].
inline InstanceDocument gen_affine_warp(const InstanceDocument& doc, std::uint64_t seed) {
  const int d = doc.dim;
  Rng rng = make_rng(seed, 0x5eed);
  std::uniform_real_distribution<double> logs(0.0, std::log(100.0));
  Vector s(d);
  for (int i = 0; i < d; ++i) s(i) = std::exp(logs(rng));
  const Matrix u = random_orthogonal(rng, d);
  const Matrix v = random_orthogonal(rng, d);
  const Matrix linear = u * s.asDiagonal() * v.transpose();
  const Vector offset = random_gaussian(rng, d);
  auto out = gen_affine_warp(doc, linear, offset);
  out.meta["warp_seed"] = seed;
  return out;
}

struct OracleResult {
  std::vector<int> subfamily;  // empty when no subfamily of size <= k is bounded
  double volume = std::numeric_limits<double>::infinity();
  long long bounded_count = 0;
  long long examined = 0;
  [[nodiscard]] bool found() const { return !subfamily.empty(); }
};

// Exhaustive search for the subfamily of size <= k with the smallest bounded intersection.
inline OracleResult oracle_min_subfamily(const HPolytope& family, int k, const Tolerances& tol = {}) {
  const int d = family.dim();
  const int m = static_cast<int>(family.size());
  if (d < 2 || d > 3) throw Error(ErrorKind::CapExceeded, "oracle supports d in {2, 3}");
  if (m > kMaxOracleFacets) throw Error(ErrorKind::CapExceeded, "oracle supports at most 12 half-spaces");
  if (k > 2 * d) throw Error(ErrorKind::CapExceeded, "oracle subfamily size must be <= 2d");
  OracleResult best;
  for (int size = d + 1; size <= std::min(k, m); ++size) {
    detail::for_each_combination(m, size, [&](const std::vector<int>& sel) {
      ++best.examined;
      std::vector<HalfSpace> hs;
      for (int i : sel) hs.push_back(family[static_cast<std::size_t>(i)]);
      HPolytope g(d, std::move(hs));
      if (!is_bounded(g)) return true;
      ++best.bounded_count;
      const double v = volume(g, tol);
      if (v < best.volume) {
        best.volume = v;
        best.subfamily = sel;
      }
      return true;
    });
  }
  return best;
}

}  // namespace qhelly
