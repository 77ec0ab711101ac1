#pragma once

#include "qhelly/config.hpp"
#include "qhelly/constants.hpp"
#include "qhelly/dr.hpp"
#include "qhelly/geometry.hpp"
#include "qhelly/john.hpp"
#include "qhelly/lp.hpp"
#include "qhelly/pivovarov.hpp"
#include "qhelly/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qhelly {

struct FirstSimplex {
  std::vector<Vector> vertices;  // o, v_1, ..., v_d
  Ellipsoid e1;
  Vector u;  // center of e1
  double volume = 0.0;
};

// S1 = conv{o, v_1..v_d} with its maximal inscribed ellipsoid.
inline FirstSimplex build_s1(const DRBasis& basis) {
  const int d = static_cast<int>(basis.v.size());
  std::vector<Vector> verts;
  verts.push_back(Vector::Zero(d));
  for (const auto& v : basis.v) verts.push_back(v);
  Simplex s(verts);
  FirstSimplex out{verts, max_ellipsoid_in_simplex(s), Vector(), s.volume()};
  out.u = out.e1.center();
  return out;
}

struct RayHit {
  Vector w;
  double t = 0.0;
  std::vector<double> coeffs;  // convex coefficients over the vertices
};

// Point where the ray {t dir : t >= 0} leaves conv(vertices); o must be interior.
inline RayHit ray_hit_boundary(std::span<const Vector> vertices, const Vector& dir) {
  const auto d = dir.size();
  const auto n = static_cast<Eigen::Index>(vertices.size());
  LinearProgram lp(n + 1);
  lp.nonnegative.assign(static_cast<std::size_t>(n + 1), true);
  lp.objective(n) = 1.0;
  lp.a_eq = Matrix::Zero(d + 1, n + 1);
  lp.b_eq = Vector::Zero(d + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    lp.a_eq.col(j).head(d) = vertices[static_cast<std::size_t>(j)];
    lp.a_eq(d, j) = 1.0;
  }
  lp.a_eq.col(n).head(d) = -dir;
  lp.b_eq(d) = 1.0;
  const auto res = lp_solve(lp);
  if (res.status == LpStatus::Infeasible) throw Error(ErrorKind::Infeasible, "origin is not in the hull");
  if (res.status == LpStatus::Unbounded) throw Error(ErrorKind::Unbounded, "ray never leaves the hull");
  RayHit hit;
  hit.t = res.x(n);
  hit.w = hit.t * dir;
  hit.coeffs.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) hit.coeffs[static_cast<std::size_t>(j)] = std::max(0.0, res.x(j));
  return hit;
}

struct CaratheodoryResult {
  std::vector<int> indices;
  std::vector<double> coeffs;
};

// Rewrites a boundary point w = sum mu_j x_j using at most d of the x_j.
inline CaratheodoryResult caratheodory_reduce(const Vector& w, std::span<const Vector> vertices,
                                              const std::vector<double>& coeffs) {
  const int d = static_cast<int>(w.size());
  std::vector<int> support;
  std::vector<double> mu;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] > 1e-14) {
      support.push_back(static_cast<int>(j));
      mu.push_back(coeffs[j]);
    }
  }
  while (static_cast<int>(support.size()) > d) {
    const auto s = static_cast<Eigen::Index>(support.size());
    Matrix m(d + 1, s);
    for (Eigen::Index j = 0; j < s; ++j) {
      m.col(j).head(d) = vertices[static_cast<std::size_t>(support[static_cast<std::size_t>(j)])];
      m(d, j) = 1.0;
    }
    const Matrix ns = null_space(m, 1e-9);
    if (ns.cols() == 0)
      throw Error(ErrorKind::ReductionFailed, "no affine dependence among " + std::to_string(s) + " supporting vertices");
    Vector eta = ns.col(0);
    if (eta.maxCoeff() <= 0) eta = -eta;
    double alpha = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < s; ++j)
      if (eta(j) > 1e-14) alpha = std::min(alpha, mu[static_cast<std::size_t>(j)] / eta(j));
    std::vector<int> next_support;
    std::vector<double> next_mu;
    double drop_val = std::numeric_limits<double>::infinity();
    Eigen::Index drop = -1;
    for (Eigen::Index j = 0; j < s; ++j) {
      const double val = mu[static_cast<std::size_t>(j)] - alpha * eta(j);
      if (val < drop_val) {
        drop_val = val;
        drop = j;
      }
    }
    for (Eigen::Index j = 0; j < s; ++j) {
      const double val = mu[static_cast<std::size_t>(j)] - alpha * eta(j);
      if (j == drop || val <= 1e-15) continue;
      next_support.push_back(support[static_cast<std::size_t>(j)]);
      next_mu.push_back(val);
    }
    support = std::move(next_support);
    mu = std::move(next_mu);
  }
  double sum = 0.0;
  for (double c : mu) sum += c;
  for (double& c : mu) c /= sum;
  Vector rebuilt = Vector::Zero(d);
  for (std::size_t j = 0; j < support.size(); ++j) rebuilt += mu[j] * vertices[static_cast<std::size_t>(support[j])];
  if ((rebuilt - w).norm() > 1e-8)
    throw Error(ErrorKind::ReductionFailed, "reduced combination misses w by " + std::to_string((rebuilt - w).norm()));
  return {support, mu};
}

struct Contraction {
  Ellipsoid e2;
  double lambda = 1.0;
};

// Homothety with center w and ratio |w|/(|u|+|w|), which moves the center u of E1 to o.
inline Contraction contract_e1(const Ellipsoid& e1, const Vector& u, const Vector& w) {
  if (u.norm() <= 1e-10) return {e1, 1.0};
  if ((w / w.norm() + u / u.norm()).norm() > 1e-8)
    throw Error(ErrorKind::Misaligned, "w is not on the ray through -u");
  const double lambda = w.norm() / (u.norm() + w.norm());
  Vector center = w + lambda * (e1.center() - w);
  if (center.norm() > 1e-10) throw Error(ErrorKind::Misaligned, "contracted center misses the origin");
  return {Ellipsoid(center, lambda * e1.shape()), lambda};
}

// Full transcript of one run of the construction.
struct Certificate {
  std::string version{kVersion};
  std::string selector = "dr";
  std::uint64_t seed = 0;
  Tolerances tolerances;
  NormalizedInstance instance;
  DRBasis basis;
  FirstSimplex s1;
  Vector w;
  double ray_t = 0.0;
  bool degenerate_center = false;
  CaratheodoryResult caratheodory;  // indices into the decomposition
  double lambda = 1.0;
  Ellipsoid e2;
  std::vector<Vector> x;           // selected contact points (normalized coordinates)
  std::vector<int> x_sources;      // index of the input half-space for each point of x
  std::vector<int> subfamily;      // G as indices into the input family
  double volume_f = 0.0;           // normalized coordinates
  double volume_g = 0.0;
  double ratio = 0.0;
  double bound = 0.0;

  [[nodiscard]] int dim() const { return instance.original.dim(); }

  [[nodiscard]] HPolytope subfamily_polytope() const {
    std::vector<HalfSpace> hs;
    for (int i : subfamily) hs.push_back(instance.original[static_cast<std::size_t>(i)]);
    return HPolytope(dim(), std::move(hs));
  }
};

// Merges the Caratheodory vertices with v_1..v_d into X and computes the volume ratio.
inline Certificate assemble_subfamily(Certificate cert, const Tolerances& tol = {}) {
  const int d = cert.dim();
  const auto& dec = cert.instance.decomposition;
  cert.x.clear();
  cert.x_sources.clear();
  auto add = [&](const Vector& p, int source) {
    for (const auto& q : cert.x)
      if ((p - q).norm() <= tol.dedupe) return;
    cert.x.push_back(p);
    cert.x_sources.push_back(source);
  };
  for (int idx : cert.caratheodory.indices)
    add(dec.points[static_cast<std::size_t>(idx)], dec.sources[static_cast<std::size_t>(idx)]);
  for (int idx : cert.basis.sources)
    add(dec.points[static_cast<std::size_t>(idx)], dec.sources[static_cast<std::size_t>(idx)]);
  if (static_cast<int>(cert.x.size()) > 2 * d)
    throw Error(ErrorKind::SubfamilyTooLarge, std::to_string(cert.x.size()) + " points exceed 2d");

  cert.subfamily = cert.x_sources;
  std::sort(cert.subfamily.begin(), cert.subfamily.end());
  cert.subfamily.erase(std::unique(cert.subfamily.begin(), cert.subfamily.end()), cert.subfamily.end());

  std::vector<HalfSpace> g;
  for (int i : cert.subfamily) g.push_back(cert.instance.normalized[static_cast<std::size_t>(i)]);
  cert.volume_f = volume(cert.instance.normalized, tol);
  cert.volume_g = volume(HPolytope(d, std::move(g)), tol);
  cert.ratio = cert.volume_g / cert.volume_f;
  cert.bound = explicit_bound(d);
  return cert;
}

enum class Selector { DvoretzkyRogers, Pivovarov };

struct SelectOptions {
  Selector selector = Selector::DvoretzkyRogers;
  std::uint64_t seed = 0;
  Tolerances tolerances;
};

// Finds G with |G| <= 2d and vol(cap G) <= explicit_bound(d) vol(cap F), with a certificate.
inline Certificate select(const HPolytope& family, const SelectOptions& opts = {}) {
  const Tolerances& tol = opts.tolerances;
  std::string stage;
  try {
    Certificate cert;
    cert.tolerances = tol;
    cert.seed = opts.seed;
    cert.selector = opts.selector == Selector::Pivovarov ? "pivovarov" : "dr";

    stage = "normalize_position";
    cert.instance = normalize_position(family, tol);
    const auto& dec = cert.instance.decomposition;

    stage = "dr_select";
    cert.basis = opts.selector == Selector::Pivovarov ? pivovarov_basis(dec, opts.seed) : dr_select(dec);

    stage = "build_s1";
    cert.s1 = build_s1(cert.basis);

    stage = "ray_hit_boundary";
    Vector dir;
    if (cert.s1.u.norm() <= 1e-10) {
      cert.degenerate_center = true;
      dir = cert.basis.z.back();
    } else {
      dir = -cert.s1.u / cert.s1.u.norm();
    }
    const auto hit = ray_hit_boundary(dec.points, dir);
    cert.w = hit.w;
    cert.ray_t = hit.t;

    stage = "caratheodory_reduce";
    cert.caratheodory = caratheodory_reduce(hit.w, dec.points, hit.coeffs);

    stage = "contract_e1";
    auto con = contract_e1(cert.s1.e1, cert.s1.u, cert.w);
    cert.e2 = con.e2;
    cert.lambda = con.lambda;

    stage = "assemble_subfamily";
    return assemble_subfamily(std::move(cert), tol);
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(stage, e);
  }
}

}  // namespace qhelly
