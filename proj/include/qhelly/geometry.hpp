#pragma once

#include "qhelly/config.hpp"
#include "qhelly/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace qhelly {

// {x : <normal, x> <= offset}, normal of unit length.
struct HalfSpace {
  Vector normal;
  double offset = 0.0;

  [[nodiscard]] double slack(const Vector& x) const { return offset - normal.dot(x); }
};

inline HalfSpace normalize_halfspace(const Vector& a, double b, const Tolerances& tol = {}) {
  const double n = a.norm();
  if (!(n > tol.zero_normal)) throw Error(ErrorKind::ZeroNormal, "half-space normal has norm " + std::to_string(n));
  if (!a.allFinite() || !std::isfinite(b)) throw Error(ErrorKind::MalformedInput, "non-finite half-space");
  return {a / n, b / n};
}

class HPolytope {
 public:
  HPolytope() = default;
  HPolytope(int dim, std::vector<HalfSpace> halfspaces) : dim_(dim), halfspaces_(std::move(halfspaces)) {
    if (dim_ < 1 || dim_ > kMaxDim)
      throw Error(ErrorKind::CapExceeded, "dimension " + std::to_string(dim_) + " outside [1, 8]");
    if (static_cast<int>(halfspaces_.size()) > kMaxFacets)
      throw Error(ErrorKind::CapExceeded, std::to_string(halfspaces_.size()) + " half-spaces exceed cap 64");
    for (const auto& h : halfspaces_)
      if (h.normal.size() != dim_) throw Error(ErrorKind::MalformedInput, "half-space dimension mismatch");
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return halfspaces_.size(); }
  [[nodiscard]] const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
  [[nodiscard]] const HalfSpace& operator[](std::size_t i) const { return halfspaces_[i]; }

  [[nodiscard]] bool contains(const Vector& x, double tol = 1e-9) const {
    for (const auto& h : halfspaces_)
      if (h.slack(x) < -tol) return false;
    return true;
  }

  [[nodiscard]] Matrix normals() const {
    Matrix a(static_cast<Eigen::Index>(halfspaces_.size()), dim_);
    for (std::size_t i = 0; i < halfspaces_.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = halfspaces_[i].normal;
    return a;
  }

  [[nodiscard]] Vector offsets() const {
    Vector b(static_cast<Eigen::Index>(halfspaces_.size()));
    for (std::size_t i = 0; i < halfspaces_.size(); ++i) b(static_cast<Eigen::Index>(i)) = halfspaces_[i].offset;
    return b;
  }

 private:
  int dim_ = 0;
  std::vector<HalfSpace> halfspaces_;
};

// Builds an HPolytope from raw (a, b) rows, normalizing each.
inline HPolytope make_hpolytope(int dim, const Matrix& a, const Vector& b, const Tolerances& tol = {}) {
  std::vector<HalfSpace> hs;
  hs.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) hs.push_back(normalize_halfspace(a.row(i).transpose(), b(i), tol));
  return HPolytope(dim, std::move(hs));
}

// c + A(B), A symmetric positive definite.
class Ellipsoid {
 public:
  Ellipsoid() = default;
  Ellipsoid(Vector center, Matrix shape, double spd_floor = 1e-12)
      : center_(std::move(center)), shape_(std::move(shape)) {
    if (shape_.rows() != center_.size() || shape_.cols() != center_.size())
      throw Error(ErrorKind::MalformedInput, "ellipsoid shape/center size mismatch");
    const double asym = (shape_ - shape_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * std::max(1.0, shape_.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::MalformedInput, "ellipsoid shape is not symmetric");
    shape_ = (0.5 * (shape_ + shape_.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(shape_, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > spd_floor))
      throw Error(ErrorKind::Degenerate, "ellipsoid shape is not positive definite");
  }

  static Ellipsoid unit_ball(int d) { return {Vector::Zero(d), Matrix::Identity(d, d)}; }

  [[nodiscard]] int dim() const { return static_cast<int>(center_.size()); }
  [[nodiscard]] const Vector& center() const { return center_; }
  [[nodiscard]] const Matrix& shape() const { return shape_; }

  // max over the ellipsoid of <dir, x>.
  [[nodiscard]] double support(const Vector& dir) const { return center_.dot(dir) + (shape_ * dir).norm(); }

  // |A^{-1}(x - c)|; the ellipsoid is the sublevel set {gauge <= 1}.
  [[nodiscard]] double gauge(const Vector& x) const { return shape_.llt().solve(x - center_).norm(); }

 private:
  Vector center_;
  Matrix shape_;
};

inline double ellipsoid_volume(const Ellipsoid& e) {
  return unit_ball_volume(e.dim()) * e.shape().determinant();
}

// Polar of an origin-centered ellipsoid A(B) is A^{-1}(B).
inline Ellipsoid ellipsoid_polar(const Ellipsoid& e, double center_tol = 1e-10) {
  if (e.center().norm() > center_tol)
    throw Error(ErrorKind::NotCentered, "polar requires an origin-centered ellipsoid");
  Matrix inv = e.shape().inverse();
  return {Vector::Zero(e.dim()), 0.5 * (inv + inv.transpose())};
}

class Simplex {
 public:
  Simplex() = default;
  explicit Simplex(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw Error(ErrorKind::DegenerateSimplex, "simplex needs d+1 vertices");
    const auto d = vertices_.front().size();
    if (static_cast<Eigen::Index>(vertices_.size()) != d + 1)
      throw Error(ErrorKind::DegenerateSimplex, "simplex in R^d needs exactly d+1 vertices");
    if (std::abs(edge_matrix().determinant()) <= 1e-12)
      throw Error(ErrorKind::DegenerateSimplex, "simplex vertices are affinely dependent");
  }

  [[nodiscard]] int dim() const { return static_cast<int>(vertices_.front().size()); }
  [[nodiscard]] const std::vector<Vector>& vertices() const { return vertices_; }

  // Columns v_j - v_0, j = 1..d.
  [[nodiscard]] Matrix edge_matrix() const {
    const auto d = vertices_.front().size();
    Matrix m(d, d);
    for (Eigen::Index j = 0; j < d; ++j) m.col(j) = vertices_[static_cast<std::size_t>(j + 1)] - vertices_[0];
    return m;
  }

  [[nodiscard]] double volume() const { return std::abs(edge_matrix().determinant()) / factorial(dim()); }

  [[nodiscard]] Vector centroid() const {
    Vector c = Vector::Zero(vertices_.front().size());
    for (const auto& v : vertices_) c += v;
    return c / static_cast<double>(vertices_.size());
  }

 private:
  std::vector<Vector> vertices_;
};

// Maximal-volume inscribed ellipsoid of a simplex: the image of the insphere
// (radius 1/d) of the reference regular simplex under the vertex-matching affine map.
inline Ellipsoid max_ellipsoid_in_simplex(const Simplex& s) {
  const int d = s.dim();
  const auto ref = regular_simplex(d);
  const Vector center = s.centroid();
  Matrix r(d, d), img(d, d);
  for (int j = 0; j < d; ++j) {
    r.col(j) = ref[static_cast<std::size_t>(j)];
    img.col(j) = s.vertices()[static_cast<std::size_t>(j)] - center;
  }
  const Matrix linear = img * r.inverse();
  // L(B)/d as a symmetric shape: sqrt(L L^T)/d.
  return {center, sym_sqrt(linear * linear.transpose()) / d};
}

// Closed-form vol(E)/vol(simplex) for the maximal inscribed ellipsoid.
inline double simplex_ellipsoid_ratio(int d) {
  return std::exp(log_factorial(d) + std::log(unit_ball_volume(d)) - 0.5 * d * std::log(double(d)) -
                  0.5 * (d + 1) * std::log(d + 1.0));
}

// X* = {y : <x, y> <= 1 for all x in X}, one half-space per point.
inline HPolytope polar_of_points(std::span<const Vector> points, const Tolerances& tol = {}) {
  if (points.empty()) throw Error(ErrorKind::MalformedInput, "polar of an empty point set");
  std::vector<HalfSpace> hs;
  hs.reserve(points.size());
  for (const auto& x : points) {
    if (x.norm() <= tol.zero_normal) throw Error(ErrorKind::ZeroPoint, "polar point at the origin");
    hs.push_back(normalize_halfspace(x, 1.0, tol));
  }
  return HPolytope(static_cast<int>(points.front().size()), std::move(hs));
}

}  // namespace qhelly
