#pragma once

#include "qhelly/config.hpp"
#include "qhelly/geometry.hpp"
#include "qhelly/nnls.hpp"
#include "qhelly/polytope.hpp"
#include "qhelly/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qhelly {

// Unit vectors w_i with positive weights c_i such that sum c_i w_i = o and
// sum c_i w_i (x) w_i = I. `sources` indexes the half-space each point came from.
struct ContactDecomposition {
  std::vector<Vector> points;
  std::vector<double> weights;
  std::vector<int> sources;

  [[nodiscard]] int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  [[nodiscard]] std::size_t size() const { return points.size(); }
};

// x = linear * y + offset, carrying normalized coordinates to original ones.
struct AffineMap {
  Matrix linear;
  Vector offset;

  [[nodiscard]] Vector apply(const Vector& y) const { return linear * y + offset; }

  static AffineMap identity(int d) { return {Matrix::Identity(d, d), Vector::Zero(d)}; }
};

// Image of {<a, x> <= b} under x -> M x + t, renormalized.
inline HalfSpace transform_halfspace(const HalfSpace& h, const AffineMap& map) {
  const Vector a = map.linear.inverse().transpose() * h.normal;
  return normalize_halfspace(a, h.offset + a.dot(map.offset));
}

// Preimage: {<a, M y + t> <= b}, renormalized.
inline HalfSpace pullback_halfspace(const HalfSpace& h, const AffineMap& map) {
  const Vector a = map.linear.transpose() * h.normal;
  return normalize_halfspace(a, h.offset - h.normal.dot(map.offset));
}

struct NormalizedInstance {
  HPolytope original;
  AffineMap map;
  HPolytope normalized;  // its maximal inscribed ellipsoid is the unit ball
  ContactDecomposition decomposition;
  double contact_tolerance = 1e-7;
};

struct DecompositionReport {
  double barycenter = 0.0;  // |sum c_i w_i|
  double identity = 0.0;    // max entry of |sum c_i w_i w_i^T - I|
  double trace = 0.0;       // |sum c_i - d|
  double min_weight = 0.0;
  double unit_norm = 0.0;   // max ||w_i| - 1|

  [[nodiscard]] double residual() const { return std::max(barycenter, identity); }
};

inline DecompositionReport verify_decomposition(const ContactDecomposition& dec) {
  DecompositionReport r;
  if (dec.points.empty()) return r;
  const int d = dec.dim();
  Vector bary = Vector::Zero(d);
  Matrix frame = Matrix::Zero(d, d);
  double sum = 0.0;
  r.min_weight = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const double c = dec.weights[i];
    bary += c * dec.points[i];
    frame += c * dec.points[i] * dec.points[i].transpose();
    sum += c;
    r.min_weight = std::min(r.min_weight, c);
    r.unit_norm = std::max(r.unit_norm, std::abs(dec.points[i].norm() - 1.0));
  }
  r.barycenter = bary.norm();
  r.identity = (frame - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  r.trace = std::abs(sum - d);
  return r;
}

namespace detail {

// Maximize log det A subject to |A a_i| + <a_i, c> <= b_i via a log-barrier
// path-following method. Variables: the upper triangle of A, then c.
class InscribedEllipsoidSolver {
 public:
  InscribedEllipsoidSolver(const Matrix& a, const Vector& b, const Tolerances& tol)
      : a_(a), b_(b), tol_(tol), d_(static_cast<int>(a.cols())), nsym_(d_ * (d_ + 1) / 2), n_(nsym_ + d_) {
    for (int p = 0; p < d_; ++p)
      for (int q = p; q < d_; ++q) pairs_.emplace_back(p, q);
  }

  // Returns (center, shape) in the coordinates of (a, b).
  std::pair<Vector, Matrix> solve(const Vector& c0, double r0) {
    Vector x = Vector::Zero(n_);
    for (int k = 0; k < nsym_; ++k)
      if (pairs_[k].first == pairs_[k].second) x(k) = 0.5 * r0;
    x.tail(d_) = c0;

    const double nu = 2.0 * static_cast<double>(a_.rows());
    double t = 1.0;
    int steps = 0;
    for (;;) {
      center(x, t, steps);
      if (nu / t <= tol_.solver_gap) break;
      t *= 10.0;
    }
    return {x.tail(d_), shape(x)};
  }

 private:
  Matrix shape(const Vector& x) const {
    Matrix m(d_, d_);
    for (int k = 0; k < nsym_; ++k) {
      m(pairs_[k].first, pairs_[k].second) = x(k);
      m(pairs_[k].second, pairs_[k].first) = x(k);
    }
    return m;
  }

  bool feasible(const Vector& x) const {
    const Matrix A = shape(x);
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) return false;
    const Vector c = x.tail(d_);
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      const Vector ai = a_.row(i).transpose();
      const double s = b_(i) - ai.dot(c);
      const double u2 = (A * ai).squaredNorm();
      if (!(s > 0) || !(s * s - u2 > 0)) return false;
    }
    return true;
  }

  double objective(const Vector& x, double t) const {
    const Matrix A = shape(x);
    const Vector c = x.tail(d_);
    double f = -t * std::log(A.determinant());
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      const Vector ai = a_.row(i).transpose();
      const double s = b_(i) - ai.dot(c);
      f -= std::log(s * s - (A * ai).squaredNorm());
    }
    return f;
  }

  // E_k a for the symmetric basis matrix E_k.
  Vector basis_times(int k, const Vector& v) const {
    Vector out = Vector::Zero(d_);
    const auto [p, q] = pairs_[static_cast<std::size_t>(k)];
    if (p == q) {
      out(p) = v(p);
    } else {
      out(p) = v(q);
      out(q) = v(p);
    }
    return out;
  }

  void derivatives(const Vector& x, double t, Vector& grad, Matrix& hess) const {
    grad = Vector::Zero(n_);
    hess = Matrix::Zero(n_, n_);
    const Matrix A = shape(x);
    const Matrix inv = A.inverse();
    std::vector<Matrix> m(static_cast<std::size_t>(nsym_));
    for (int k = 0; k < nsym_; ++k) {
      const auto [p, q] = pairs_[static_cast<std::size_t>(k)];
      Matrix e = Matrix::Zero(d_, d_);
      e(p, q) = 1.0;
      e(q, p) = 1.0;
      m[static_cast<std::size_t>(k)] = inv * e;
      grad(k) = -t * m[static_cast<std::size_t>(k)].trace();
    }
    for (int k = 0; k < nsym_; ++k)
      for (int l = k; l < nsym_; ++l) {
        const double h = t * (m[static_cast<std::size_t>(k)].cwiseProduct(m[static_cast<std::size_t>(l)].transpose())).sum();
        hess(k, l) = h;
        hess(l, k) = h;
      }

    const Vector c = x.tail(d_);
    Matrix jac(d_ + 1, n_);
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      const Vector ai = a_.row(i).transpose();
      const double s = b_(i) - ai.dot(c);
      const Vector u = A * ai;
      const double g = s * s - u.squaredNorm();
      jac.setZero();
      jac.block(0, nsym_, 1, d_) = -ai.transpose();
      for (int k = 0; k < nsym_; ++k) jac.block(1, k, d_, 1) = basis_times(k, ai);
      Vector jy(d_ + 1);  // diag(1, -I) y
      jy(0) = s;
      jy.tail(d_) = -u;
      Vector gy = -2.0 / g * jy;
      Matrix hy = (4.0 / (g * g)) * jy * jy.transpose();
      hy(0, 0) -= 2.0 / g;
      for (int r = 1; r <= d_; ++r) hy(r, r) += 2.0 / g;
      grad += jac.transpose() * gy;
      hess += jac.transpose() * hy * jac;
    }
  }

  void center(Vector& x, double t, int& steps) const {
    Vector grad;
    Matrix hess;
    double prev_lambda = std::numeric_limits<double>::infinity();
    for (;;) {
      derivatives(x, t, grad, hess);
      Eigen::LDLT<Matrix> ldlt(hess);
      Vector dx = ldlt.solve(-grad);
      if (!dx.allFinite()) throw Error(ErrorKind::NoConvergence, "singular Newton system");
      const double dec2 = -grad.dot(dx);
      const double lambda = std::sqrt(std::max(dec2, 0.0));
      // Newton decrement at this level leaves a negligible centering error.
      if (lambda <= 1e-5) return;
      // Rounding floor: the quadratic phase stopped contracting.
      if (lambda < 1e-3 && lambda > 0.5 * prev_lambda) return;
      prev_lambda = lambda;
      // Backtrack from a full step; the self-concordant damped step 1/(1+lambda)
      // is the floor, since it always decreases the barrier.
      const double damped = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
      const double f0 = objective(x, t);
      double alpha = 1.0;
      while (alpha > damped) {
        const Vector trial = x + alpha * dx;
        if (feasible(trial) && objective(trial, t) <= f0 - 0.25 * alpha * dec2) break;
        alpha *= 0.5;
      }
      alpha = std::max(alpha, damped);
      int halvings = 0;
      while (!feasible(x + alpha * dx)) {
        alpha *= 0.5;
        if (++halvings > 60) return;  // no representable progress left
      }
      x += alpha * dx;
      if (++steps > tol_.newton_cap)
        throw Error(ErrorKind::NoConvergence, "ellipsoid solver exceeded " + std::to_string(tol_.newton_cap) + " Newton steps");
    }
  }

  Matrix a_;
  Vector b_;
  Tolerances tol_;
  int d_, nsym_, n_;
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace detail

namespace detail {

// Solves in coordinates x = c0 + A0 y, where the rows are rescaled to unit normals.
inline std::pair<Vector, Matrix> solve_whitened(const HPolytope& p, const Vector& c0, const Matrix& a0,
                                                const Tolerances& tol) {
  const int d = p.dim();
  const auto m = static_cast<Eigen::Index>(p.size());
  Matrix a(m, d);
  Vector b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& h = p[static_cast<std::size_t>(i)];
    const Vector ai = a0 * h.normal;
    const double n = ai.norm();
    a.row(i) = ai.transpose() / n;
    b(i) = (h.offset - h.normal.dot(c0)) / n;
  }
  InscribedEllipsoidSolver solver(a, b, tol);
  auto [c, s] = solver.solve(Vector::Zero(d), 1.0);
  const Matrix m2 = a0 * s;
  return {c0 + a0 * c, sym_sqrt(m2 * m2.transpose())};
}

}  // namespace detail

// Maximal-volume ellipsoid c + A(B) inside P. A coarse pass started from the Chebyshev
// ball supplies a whitening map; the accurate pass then runs in near-round coordinates.
inline Ellipsoid inscribed_ellipsoid(const HPolytope& p, const Tolerances& tol = {}) {
  const auto ball = validate_body(p, tol);
  const int d = p.dim();
  Tolerances coarse = tol;
  coarse.solver_gap = 1e-2;
  auto [c0, a0] = detail::solve_whitened(p, ball.center, ball.radius * Matrix::Identity(d, d), coarse);
  auto [center, shape] = detail::solve_whitened(p, c0, a0, tol);
  Ellipsoid e(center, shape, tol.spd_floor);
  for (const auto& h : p.halfspaces())
    if (e.support(h.normal) > h.offset + tol.feasibility * std::max(1.0, std::abs(h.offset)))
      throw Error(ErrorKind::NoConvergence, "inscribed ellipsoid violates a half-space");
  return e;
}

// Indices of half-spaces of a normalized polytope that touch the unit ball (offset <= 1 + tol).
inline std::vector<int> contact_indices(const HPolytope& normalized, double tol) {
  std::vector<int> out;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const auto& h = normalized[i];
    if (h.offset > 1.0 + tol) continue;
    bool dup = false;
    for (int j : out)
      if ((normalized[static_cast<std::size_t>(j)].normal - h.normal).norm() <= 1e-9) dup = true;
    if (!dup) out.push_back(static_cast<int>(i));
  }
  if (static_cast<int>(out.size()) < normalized.dim() + 1)
    throw Error(ErrorKind::TooFewContacts,
                "found " + std::to_string(out.size()) + " contact points, need at least d+1");
  return out;
}

inline std::vector<Vector> contact_points(const HPolytope& normalized, double tol = 1e-7) {
  std::vector<Vector> out;
  for (int i : contact_indices(normalized, tol)) out.push_back(normalized[static_cast<std::size_t>(i)].normal);
  return out;
}

// Nonnegative weights realizing John's identity on the given unit vectors.
// Entries at or below the weight floor come back as exactly zero.
// With balanced = false only sum c_i w_i (x) w_i = I is imposed.
inline std::vector<double> john_weights(const std::vector<Vector>& points, const Tolerances& tol = {},
                                        bool balanced = true) {
  if (points.empty()) throw Error(ErrorKind::NoDecomposition, "no points");
  const int d = static_cast<int>(points.front().size());
  const auto m = static_cast<Eigen::Index>(points.size());
  const int nsym = d * (d + 1) / 2;
  const int rows = nsym + (balanced ? d : 0);
  Matrix sys(rows, m);
  Vector rhs = Vector::Zero(rows);
  int r = 0;
  for (int p = 0; p < d; ++p)
    for (int q = p; q < d; ++q, ++r) {
      for (Eigen::Index i = 0; i < m; ++i) sys(r, i) = points[static_cast<std::size_t>(i)](p) * points[static_cast<std::size_t>(i)](q);
      rhs(r) = p == q ? 1.0 : 0.0;
    }
  if (balanced)
    for (int p = 0; p < d; ++p, ++r)
      for (Eigen::Index i = 0; i < m; ++i) sys(r, i) = points[static_cast<std::size_t>(i)](p);

  const auto sol = nnls(sys, rhs);
  std::vector<double> w(static_cast<std::size_t>(m));
  ContactDecomposition check;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double c = sol.x(i) > tol.weight_floor ? sol.x(i) : 0.0;
    w[static_cast<std::size_t>(i)] = c;
    if (c > 0) {
      check.points.push_back(points[static_cast<std::size_t>(i)]);
      check.weights.push_back(c);
    }
  }
  const auto rep = verify_decomposition(check);
  const double residual = balanced ? rep.residual() : rep.identity;
  if (check.points.empty() || !(residual <= tol.decomposition))
    throw Error(ErrorKind::NoDecomposition, "John identity residual " + std::to_string(residual));
  return w;
}

// Keeps only the positively weighted points.
inline ContactDecomposition make_decomposition(const std::vector<Vector>& points, const std::vector<double>& weights,
                                               const std::vector<int>& sources = {}) {
  ContactDecomposition dec;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] <= 0) continue;
    dec.points.push_back(points[i]);
    dec.weights.push_back(weights[i]);
    dec.sources.push_back(sources.empty() ? static_cast<int>(i) : sources[i]);
  }
  return dec;
}

// Affine normalization putting the maximal inscribed ellipsoid at the unit ball,
// followed by contact extraction and John weights.
inline NormalizedInstance normalize_position(const HPolytope& p, const Tolerances& tol = {}) {
  const Ellipsoid e = inscribed_ellipsoid(p, tol);
  const int d = p.dim();
  AffineMap map{e.shape(), e.center()};
  std::vector<HalfSpace> hs;
  hs.reserve(p.size());
  for (const auto& h : p.halfspaces()) hs.push_back(pullback_halfspace(h, map));
  HPolytope normalized(d, std::move(hs));

  // Near-contacts with zero weight are pruned by NNLS; widen the contact band only
  // when the default one misses a contact the solver has not fully tightened.
  double contact_tol = tol.contact;
  for (int attempt = 0;; ++attempt) {
    try {
      const auto idx = contact_indices(normalized, contact_tol);
      std::vector<Vector> pts;
      for (int i : idx) pts.push_back(normalized[static_cast<std::size_t>(i)].normal);
      const auto w = john_weights(pts, tol);
      return {p, map, normalized, make_decomposition(pts, w, idx), contact_tol};
    } catch (const Error& err) {
      if (attempt >= 2 || (err.kind() != ErrorKind::NoDecomposition && err.kind() != ErrorKind::TooFewContacts)) throw;
      contact_tol *= 10.0;
    }
  }
}

namespace detail {

// Unit vectors u_i and weights c_i with sum c_i u_i u_i^T = I, from k Gaussian
// vectors whitened by their scatter matrix.
inline void append_tight_frame(Rng& rng, int d, int k, double scale, bool antipodal, std::vector<Vector>& pts,
                               std::vector<double>& w) {
  std::vector<Vector> xs;
  Matrix scatter = Matrix::Zero(d, d);
  for (int i = 0; i < k; ++i) {
    xs.push_back(random_gaussian(rng, d));
    scatter += xs.back() * xs.back().transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(scatter);
  const Matrix whiten = es.operatorInverseSqrt();
  for (const auto& x : xs) {
    const Vector y = whiten * x;
    const double c = y.squaredNorm();
    pts.push_back(y / y.norm());
    w.push_back(antipodal ? scale * c / 2 : scale * c);
    if (antipodal) {
      pts.push_back(-pts.back());
      w.push_back(scale * c / 2);
    }
  }
}

inline void append_rotated_simplex(Rng& rng, int d, double scale, std::vector<Vector>& pts, std::vector<double>& w) {
  const Matrix q = random_orthogonal(rng, d);
  for (const auto& v : regular_simplex(d)) {
    pts.push_back(q * v);
    w.push_back(scale * d / (d + 1.0));
  }
}

}  // namespace detail

// Random exact decomposition with at most m points.
// Balanced: a convex mix of a rotated regular simplex with either an antipodal
// tight frame (when m >= 3d + 1) or a second rotated simplex (when m >= 2d + 2).
// Unbalanced: a whitened Gaussian frame of m points, so the barycenter is generically nonzero.
inline ContactDecomposition random_decomposition(int d, int m, std::uint64_t seed, bool balanced = true) {
  if (m < (balanced ? d + 1 : d)) throw Error(ErrorKind::NoDecomposition, "too few points for a decomposition");
  Rng rng = make_rng(seed, 0xdec);
  std::vector<Vector> pts;
  std::vector<double> w;
  if (!balanced) {
    detail::append_tight_frame(rng, d, m, 1.0, false, pts, w);
    return make_decomposition(pts, w);
  }
  const int rest = m - (d + 1);
  const double t = rest >= d + 1 ? std::uniform_real_distribution<double>(0.2, 0.8)(rng) : 1.0;
  detail::append_rotated_simplex(rng, d, t, pts, w);
  if (rest >= 2 * d)
    detail::append_tight_frame(rng, d, rest / 2, 1.0 - t, true, pts, w);
  else if (rest >= d + 1)
    detail::append_rotated_simplex(rng, d, 1.0 - t, pts, w);
  return make_decomposition(pts, w);
}

}  // namespace qhelly
