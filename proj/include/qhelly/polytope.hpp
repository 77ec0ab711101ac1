#pragma once

#include "qhelly/config.hpp"
#include "qhelly/geometry.hpp"
#include "qhelly/lp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <vector>

namespace qhelly {

// Points in convex position; construct through make_vpolytope to prune interior points.
struct VPolytope {
  std::vector<Vector> vertices;

  [[nodiscard]] int dim() const { return vertices.empty() ? 0 : static_cast<int>(vertices.front().size()); }
};

namespace detail {

// Calls fn(indices) for each k-subset of {0..n-1} in lexicographic order.
// Stops early when fn returns false. Returns the number of subsets visited.
inline long long for_each_combination(int n, int k, const std::function<bool(const std::vector<int>&)>& fn) {
  if (k > n || k < 0) return 0;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  long long count = 0;
  for (;;) {
    ++count;
    if (!fn(idx)) return count;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return count;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Dimension of the affine hull of the selected points.
inline int affine_rank(std::span<const Vector> pts, const std::vector<int>& sel, double tol = 1e-9) {
  if (sel.size() <= 1) return 0;
  const auto d = pts.front().size();
  Matrix diff(d, static_cast<Eigen::Index>(sel.size() - 1));
  for (std::size_t j = 1; j < sel.size(); ++j)
    diff.col(static_cast<Eigen::Index>(j - 1)) =
        pts[static_cast<std::size_t>(sel[j])] - pts[static_cast<std::size_t>(sel[0])];
  return static_cast<int>(matrix_rank(diff, tol));
}

}  // namespace detail

// Largest inscribed ball of P (Chebyshev center). Radius is +inf when P is unbounded in every
// direction a ball can grow; status Infeasible when P is empty.
struct ChebyshevBall {
  LpStatus status = LpStatus::Infeasible;
  Vector center;
  double radius = 0.0;
};

inline ChebyshevBall chebyshev_ball(const HPolytope& p) {
  const int d = p.dim();
  const auto m = static_cast<Eigen::Index>(p.size());
  LinearProgram lp(d + 1);
  lp.objective(d) = 1.0;
  lp.a_ub = Matrix::Zero(m + 1, d + 1);
  lp.b_ub = Vector::Zero(m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    lp.a_ub.row(i).head(d) = p[static_cast<std::size_t>(i)].normal.transpose();
    lp.a_ub(i, d) = 1.0;
    lp.b_ub(i) = p[static_cast<std::size_t>(i)].offset;
  }
  // r <= large cap keeps the LP bounded so the center is always returned.
  lp.a_ub(m, d) = 1.0;
  lp.b_ub(m) = 1e12;
  lp.nonnegative.assign(static_cast<std::size_t>(d + 1), false);
  lp.nonnegative[static_cast<std::size_t>(d)] = true;
  auto res = lp_solve(lp);
  if (!res.optimal()) return {res.status, Vector(), 0.0};
  return {LpStatus::Optimal, res.x.head(d), res.x(d)};
}

// Throws Empty / Unbounded / Degenerate unless P is a bounded full-dimensional body.
inline ChebyshevBall validate_body(const HPolytope& p, const Tolerances& tol = {}) {
  auto ball = chebyshev_ball(p);
  if (ball.status == LpStatus::Infeasible) throw Error(ErrorKind::Empty, "polytope is empty");
  for (int i = 0; i < p.dim(); ++i) {
    for (double sign : {1.0, -1.0}) {
      LinearProgram lp(p.dim());
      lp.objective(i) = sign;
      lp.a_ub = p.normals();
      lp.b_ub = p.offsets();
      if (lp_solve(lp).status == LpStatus::Unbounded)
        throw Error(ErrorKind::Unbounded, "polytope is unbounded along axis " + std::to_string(i));
    }
  }
  if (ball.radius < tol.degenerate_radius)
    throw Error(ErrorKind::Degenerate, "polytope is not full-dimensional");
  return ball;
}

inline bool is_bounded(const HPolytope& p) {
  try {
    validate_body(p);
    return true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Unbounded) return false;
    throw;
  }
}

// All vertices of a bounded full-dimensional H-polytope by brute force over d-subsets of facets.
inline VPolytope vertex_enumeration(const HPolytope& p, const Tolerances& tol = {}) {
  validate_body(p, tol);
  const int d = p.dim();
  const int m = static_cast<int>(p.size());
  if (detail::binomial(m, d) > static_cast<double>(tol.enumeration_cap))
    throw Error(ErrorKind::CapExceeded, "too many facet subsets for brute-force enumeration");
  const Matrix a = p.normals();
  const Vector b = p.offsets();
  VPolytope out;
  Matrix sys(d, d);
  Vector rhs(d);
  detail::for_each_combination(m, d, [&](const std::vector<int>& idx) {
    for (int r = 0; r < d; ++r) {
      sys.row(r) = a.row(idx[static_cast<std::size_t>(r)]);
      rhs(r) = b(idx[static_cast<std::size_t>(r)]);
    }
    Eigen::FullPivLU<Matrix> lu(sys);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) return true;
    Vector x = lu.solve(rhs);
    if (!x.allFinite()) return true;
    for (int i = 0; i < m; ++i)
      if (b(i) - a.row(i).dot(x) < -tol.incidence * std::max(1.0, std::abs(b(i)))) return true;
    for (const auto& v : out.vertices)
      if ((v - x).norm() <= tol.dedupe * std::max(1.0, x.norm())) return true;
    out.vertices.push_back(std::move(x));
    return true;
  });
  return out;
}

// l1 distance-like residual of x from conv(points); zero iff x is in the hull.
inline double hull_membership_residual(std::span<const Vector> points, const Vector& x) {
  const auto d = x.size();
  const auto n = static_cast<Eigen::Index>(points.size());
  // Variables: mu (n), e+ (d), e- (d); minimize sum(e+ + e-).
  LinearProgram lp(n + 2 * d);
  lp.nonnegative.assign(static_cast<std::size_t>(n + 2 * d), true);
  lp.objective.tail(2 * d).setConstant(-1.0);
  lp.a_eq = Matrix::Zero(d + 1, n + 2 * d);
  lp.b_eq = Vector::Zero(d + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    lp.a_eq.col(j).head(d) = points[static_cast<std::size_t>(j)];
    lp.a_eq(d, j) = 1.0;
  }
  lp.a_eq.block(0, n, d, d) = Matrix::Identity(d, d);
  lp.a_eq.block(0, n + d, d, d) = -Matrix::Identity(d, d);
  lp.b_eq.head(d) = x;
  lp.b_eq(d) = 1.0;
  auto res = lp_solve(lp);
  return res.optimal() ? -res.value : std::numeric_limits<double>::infinity();
}

// Deduplicates and drops points lying in the hull of the others.
inline VPolytope make_vpolytope(std::span<const Vector> points, const Tolerances& tol = {}) {
  std::vector<Vector> uniq;
  for (const auto& p : points) {
    bool dup = false;
    for (const auto& q : uniq)
      if ((p - q).norm() <= tol.dedupe) dup = true;
    if (!dup) uniq.push_back(p);
  }
  VPolytope out;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    std::vector<Vector> others;
    for (std::size_t j = 0; j < uniq.size(); ++j)
      if (j != i) others.push_back(uniq[j]);
    if (others.empty() || hull_membership_residual(others, uniq[i]) > tol.incidence) out.vertices.push_back(uniq[i]);
  }
  return out;
}

// Facet hyperplanes of conv(points) by brute force over d-subsets of points.
inline HPolytope facets_of_points(std::span<const Vector> points, const Tolerances& tol = {}) {
  if (points.empty()) throw Error(ErrorKind::MalformedInput, "no points");
  const int d = static_cast<int>(points.front().size());
  const int n = static_cast<int>(points.size());
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  if (detail::affine_rank(points, all) < d) throw Error(ErrorKind::Degenerate, "points are not full-dimensional");
  if (detail::binomial(n, d) > static_cast<double>(tol.enumeration_cap))
    throw Error(ErrorKind::CapExceeded, "too many point subsets for facet enumeration");

  std::vector<HalfSpace> facets;
  std::vector<std::vector<int>> seen;
  detail::for_each_combination(n, d, [&](const std::vector<int>& idx) {
    Matrix diff(d - 1 > 0 ? d - 1 : 0, d);
    for (int j = 1; j < d; ++j)
      diff.row(j - 1) = (points[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] -
                         points[static_cast<std::size_t>(idx[0])]).transpose();
    Vector normal;
    if (d == 1) {
      normal = Vector::Ones(1);
    } else {
      Matrix ns = null_space(diff, 1e-10);
      if (ns.cols() != 1) return true;
      normal = ns.col(0);
    }
    double off = normal.dot(points[static_cast<std::size_t>(idx[0])]);
    int above = 0, below = 0;
    std::vector<int> incident;
    for (int i = 0; i < n; ++i) {
      const double s = normal.dot(points[static_cast<std::size_t>(i)]) - off;
      if (s > tol.incidence) ++above;
      else if (s < -tol.incidence) ++below;
      else incident.push_back(i);
    }
    if (above > 0 && below > 0) return true;
    if (above > 0) {
      normal = -normal;
      off = -off;
    }
    if (std::find(seen.begin(), seen.end(), incident) != seen.end()) return true;
    seen.push_back(incident);
    facets.push_back({normal, off});
    return true;
  });
  return HPolytope(d, std::move(facets));
}

namespace detail {

// k-volume of the face spanned by `face` (vertex indices, affine dimension k) by pyramid
// decomposition over its (k-1)-faces. Faces are identified by incident vertex sets.
class PyramidVolume {
 public:
  PyramidVolume(std::span<const Vector> verts, std::vector<std::vector<int>> facet_incidence, double tol)
      : verts_(verts), incidence_(std::move(facet_incidence)), tol_(tol) {}

  double face_volume(const std::vector<int>& face, int k) {
    if (k == 0) return 1.0;
    if (auto it = memo_.find(face); it != memo_.end()) return it->second;
    double vol = 0.0;
    if (k == 1) {
      double best = 0.0;
      for (int i : face)
        for (int j : face) best = std::max(best, (verts_[sz(i)] - verts_[sz(j)]).norm());
      vol = best;
    } else {
      Vector apex = Vector::Zero(verts_.front().size());
      for (int i : face) apex += verts_[sz(i)];
      apex /= static_cast<double>(face.size());
      std::vector<std::vector<int>> subfaces;
      for (const auto& inc : incidence_) {
        std::vector<int> sub;
        std::set_intersection(face.begin(), face.end(), inc.begin(), inc.end(), std::back_inserter(sub));
        if (static_cast<int>(sub.size()) < k || sub.size() == face.size()) continue;
        if (std::find(subfaces.begin(), subfaces.end(), sub) != subfaces.end()) continue;
        if (affine_rank(verts_, sub, tol_) != k - 1) continue;
        subfaces.push_back(std::move(sub));
      }
      for (const auto& sub : subfaces) vol += height(apex, sub) * face_volume(sub, k - 1) / k;
    }
    memo_.emplace(face, vol);
    return vol;
  }

 private:
  static std::size_t sz(int i) { return static_cast<std::size_t>(i); }

  // Distance from apex to the affine hull of the subface.
  double height(const Vector& apex, const std::vector<int>& sub) const {
    const Vector& p0 = verts_[sz(sub[0])];
    Matrix diff(p0.size(), static_cast<Eigen::Index>(sub.size() - 1));
    for (std::size_t j = 1; j < sub.size(); ++j) diff.col(static_cast<Eigen::Index>(j - 1)) = verts_[sz(sub[j])] - p0;
    Vector r = apex - p0;
    if (diff.cols() == 0) return r.norm();
    Eigen::ColPivHouseholderQR<Matrix> qr(diff);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    Matrix q = qr.householderQ() * Matrix::Identity(diff.rows(), diff.rows());
    Matrix basis = q.leftCols(rank);
    return (r - basis * (basis.transpose() * r)).norm();
  }

  std::span<const Vector> verts_;
  std::vector<std::vector<int>> incidence_;
  double tol_;
  std::map<std::vector<int>, double> memo_;
};

inline double volume_from_facets(std::span<const Vector> verts, const HPolytope& facets, double tol) {
  const int d = facets.dim();
  std::vector<int> all(verts.size());
  std::iota(all.begin(), all.end(), 0);
  if (affine_rank(verts, all) < d) throw Error(ErrorKind::Degenerate, "polytope is not full-dimensional");
  std::vector<std::vector<int>> incidence;
  for (const auto& h : facets.halfspaces()) {
    std::vector<int> inc;
    for (std::size_t i = 0; i < verts.size(); ++i)
      if (std::abs(h.slack(verts[i])) <= tol * std::max(1.0, std::abs(h.offset))) inc.push_back(static_cast<int>(i));
    incidence.push_back(std::move(inc));
  }
  PyramidVolume pv(verts, std::move(incidence), tol);
  return pv.face_volume(all, d);
}

}  // namespace detail

inline double volume(const HPolytope& p, const Tolerances& tol = {}) {
  const auto v = vertex_enumeration(p, tol);
  return detail::volume_from_facets(v.vertices, p, tol.incidence);
}

inline double volume(const VPolytope& p, const Tolerances& tol = {}) {
  const auto facets = facets_of_points(p.vertices, tol);
  return detail::volume_from_facets(p.vertices, facets, tol.incidence);
}

}  // namespace qhelly
