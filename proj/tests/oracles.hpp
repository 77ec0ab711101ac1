#pragma once

// Independent reference computations for the test suite. None of these call into the
// library's LP, vertex enumeration, volume, or ellipsoid code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Line {
  double ax, ay, b;  // ax x + ay y <= b, unit normal
  double angle;
};

inline Eigen::Vector2d intersect(const Line& p, const Line& q) {
  const double det = p.ax * q.ay - p.ay * q.ax;
  return {(p.b * q.ay - p.ay * q.b) / det, (p.ax * q.b - p.b * q.ax) / det};
}

// Vertices of a bounded 2-D half-plane intersection in counterclockwise order. Lines are
// sorted by normal angle; a line is dropped while its neighbours meet inside it.
inline std::vector<Eigen::Vector2d> angular_sweep(const std::vector<Vec>& normals, const std::vector<double>& offsets) {
  std::vector<Line> lines;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const double n = normals[i].norm();
    lines.push_back({normals[i](0) / n, normals[i](1) / n, offsets[i] / n, std::atan2(normals[i](1), normals[i](0))});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.angle < b.angle; });
  bool changed = true;
  while (changed && lines.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto& prev = lines[(i + lines.size() - 1) % lines.size()];
      const auto& next = lines[(i + 1) % lines.size()];
      const auto& cur = lines[i];
      // Neighbours spanning half a turn or more would leave the region unbounded without cur.
      const double span = std::fmod(next.angle - prev.angle + 4 * M_PI, 2 * M_PI);
      if (span >= M_PI) continue;
      const auto p = intersect(prev, next);
      if (cur.ax * p(0) + cur.ay * p(1) <= cur.b + 1e-12) {
        lines.erase(lines.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  std::vector<Eigen::Vector2d> out;
  for (std::size_t i = 0; i < lines.size(); ++i) out.push_back(intersect(lines[i], lines[(i + 1) % lines.size()]));
  return out;
}

inline double shoelace(const std::vector<Eigen::Vector2d>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    s += p(0) * q(1) - p(1) * q(0);
  }
  return 0.5 * std::abs(s);
}

// max c.x over {A x <= b} by scanning every basic point (d rows active).
inline double brute_force_lp_max(const Vec& c, const Mat& a, const Vec& b) {
  const auto m = a.rows();
  const auto d = a.cols();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<bool> pick(static_cast<std::size_t>(m), false);
  std::fill(pick.begin(), pick.begin() + d, true);
  do {
    Mat sub(d, d);
    Vec rhs(d);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (pick[static_cast<std::size_t>(i)]) {
        sub.row(r) = a.row(i);
        rhs(r++) = b(i);
      }
    Eigen::PartialPivLU<Mat> lu(sub);
    if (std::abs(sub.determinant()) < 1e-12) continue;
    const Vec x = lu.solve(rhs);
    if (((a * x - b).array() <= 1e-9).all()) best = std::max(best, c.dot(x));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

struct McEstimate {
  double value, sigma;
};

// Hit-or-miss volume of c + A(B) inside its bounding box.
inline McEstimate monte_carlo_ellipsoid_volume(const Mat& shape, long n, std::uint64_t seed) {
  const auto d = shape.rows();
  std::mt19937_64 rng(seed);
  Vec half(d);
  for (Eigen::Index i = 0; i < d; ++i) half(i) = shape.row(i).norm();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Mat inv = shape.inverse();
  long hits = 0;
  for (long k = 0; k < n; ++k) {
    Vec x(d);
    for (Eigen::Index i = 0; i < d; ++i) x(i) = half(i) * u(rng);
    if ((inv * x).squaredNorm() <= 1.0) ++hits;
  }
  const double box = std::pow(2.0, double(d)) * half.prod();
  const double p = double(hits) / double(n);
  return {box * p, box * std::sqrt(p * (1 - p) / double(n))};
}

// d+1 unit vectors summing to zero, built from the centered standard basis of R^(d+1).
inline std::vector<Vec> regular_simplex_vertices(int d) {
  Mat e = Mat::Identity(d + 1, d + 1);
  e.rowwise() -= e.colwise().mean();
  Eigen::JacobiSVD<Mat> svd(e, Eigen::ComputeThinU);
  const Mat basis = svd.matrixU().leftCols(d);  // orthonormal basis of the sum-zero plane
  std::vector<Vec> out;
  for (int j = 0; j <= d; ++j) {
    Vec p = basis.transpose() * e.col(j);
    out.push_back(p / p.norm());
  }
  return out;
}

// The scalar c with c * sum w w^T = I, or NaN if sum w w^T is not a multiple of I.
inline double isotropic_weight(const std::vector<Vec>& pts) {
  const auto d = pts.front().size();
  Mat s = Mat::Zero(d, d);
  for (const auto& p : pts) s += p * p.transpose();
  const double scale = s.trace() / double(d);
  if ((s - scale * Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 / scale;
}

// E[vol] and E[vol^2] for two i.i.d. picks in the plane, via the cross product.
inline std::pair<double, double> planar_pick_moments(const std::vector<Vec>& pts, const std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double p = w[i] * w[j] / (total * total);
      const double area = 0.5 * std::abs(pts[i](0) * pts[j](1) - pts[i](1) * pts[j](0));
      m1 += p * area;
      m2 += p * area * area;
    }
  return {m1, m2};
}

// Minimum over random unit directions u of the support value max_i <p_i, u>.
inline double min_support(const std::vector<Vec>& pts, int dirs, std::uint64_t seed) {
  const auto d = pts.front().size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dirs; ++k) {
    Vec u(d);
    for (Eigen::Index i = 0; i < d; ++i) u(i) = n(rng);
    u.normalize();
    double h = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) h = std::max(h, p.dot(u));
    best = std::min(best, h);
  }
  return best;
}

}  // namespace oracle
