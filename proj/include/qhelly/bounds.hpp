#pragma once

#include "qhelly/constants.hpp"
#include "qhelly/geometry.hpp"
#include "qhelly/john.hpp"
#include "qhelly/polytope.hpp"
#include "qhelly/selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace qhelly {

struct CheckItem {
  std::string group;  // which inequality of the construction this witnesses
  std::string name;
  bool passed = false;
  double slack = 0.0;  // margin; negative means violated
  double tolerance = 0.0;
  bool applicable = true;
};

struct CheckReport {
  std::vector<CheckItem> items;

  [[nodiscard]] bool pass() const {
    return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
  }

  [[nodiscard]] const CheckItem* find(const std::string& name) const {
    for (const auto& c : items)
      if (c.name == name) return &c;
    return nullptr;
  }

  [[nodiscard]] std::set<std::string> failing_groups() const {
    std::set<std::string> out;
    for (const auto& c : items)
      if (!c.passed) out.insert(c.group);
    return out;
  }
};

// Bound of the final estimate for an arbitrary non-degenerate S1:
// d^(d/2) (d+1)^((3d+1)/2) / (d! vol S1).
inline double ratio_bound_for_simplex(int d, double s1_volume) {
  return std::exp(0.5 * d * std::log(double(d)) + 0.5 * (3.0 * d + 1.0) * std::log(d + 1.0) - log_factorial(d) -
                  std::log(s1_volume));
}

namespace detail {

class CertificateChecker {
 public:
  CertificateChecker(const Certificate& cert, double scale) : c_(cert), scale_(scale), d_(cert.dim()) {}

  CheckReport run() {
    validate_shape();
    recompute();
    check_normalization();
    check_decomposition();
    check_basis();
    check_s1();
    check_w();
    check_caratheodory();
    check_contraction();
    check_containments();
    check_subfamily();
    check_ratio();
    return std::move(report_);
  }

 private:
  // A check passes when slack >= -tolerance.
  void add(const std::string& group, const std::string& name, double slack, double tolerance, bool applicable = true) {
    const bool ok = !applicable || (std::isfinite(slack) && slack >= -tolerance);
    report_.items.push_back({group, name, ok, slack, tolerance, applicable});
  }

  [[noreturn]] static void malformed(const std::string& what) { throw Error(ErrorKind::MalformedCertificate, what); }

  void validate_shape() const {
    const auto d = static_cast<Eigen::Index>(d_);
    const auto& dec = c_.instance.decomposition;
    if (d_ < 1) malformed("dimension");
    if (c_.instance.map.linear.rows() != d || c_.instance.map.linear.cols() != d || c_.instance.map.offset.size() != d)
      malformed("affine map");
    if (c_.instance.normalized.size() != c_.instance.original.size()) malformed("normalized family size");
    if (dec.points.empty() || dec.points.size() != dec.weights.size() || dec.points.size() != dec.sources.size())
      malformed("decomposition");
    for (std::size_t i = 0; i < dec.size(); ++i) {
      if (dec.points[i].size() != d) malformed("decomposition point size");
      if (dec.sources[i] < 0 || static_cast<std::size_t>(dec.sources[i]) >= c_.instance.original.size())
        malformed("decomposition source index");
    }
    if (c_.basis.z.size() != static_cast<std::size_t>(d_) || c_.basis.v.size() != static_cast<std::size_t>(d_) ||
        c_.basis.sources.size() != static_cast<std::size_t>(d_))
      malformed("basis");
    for (int s : c_.basis.sources)
      if (s < 0 || static_cast<std::size_t>(s) >= dec.size()) malformed("basis source index");
    if (c_.s1.vertices.size() != static_cast<std::size_t>(d_ + 1) || c_.s1.u.size() != d) malformed("s1");
    if (c_.w.size() != d) malformed("w");
    if (c_.caratheodory.indices.size() != c_.caratheodory.coeffs.size() || c_.caratheodory.indices.empty())
      malformed("caratheodory");
    for (int i : c_.caratheodory.indices)
      if (i < 0 || static_cast<std::size_t>(i) >= dec.size()) malformed("caratheodory index");
    if (c_.x.empty() || c_.x.size() != c_.x_sources.size()) malformed("x");
    for (int s : c_.x_sources)
      if (s < 0 || static_cast<std::size_t>(s) >= c_.instance.original.size()) malformed("x source index");
    for (int s : c_.subfamily)
      if (s < 0 || static_cast<std::size_t>(s) >= c_.instance.original.size()) malformed("subfamily index");
    if (c_.s1.e1.dim() != d_ || c_.e2.dim() != d_) malformed("ellipsoids");
  }

  // Everything downstream is rebuilt from the primary witnesses: the input family, the map,
  // the decomposition, the basis, w, and X.
  void recompute() {
    std::vector<HalfSpace> hs;
    for (const auto& h : c_.instance.original.halfspaces()) hs.push_back(pullback_halfspace(h, c_.instance.map));
    normalized_ = HPolytope(d_, std::move(hs));

    std::vector<Vector> verts{Vector::Zero(d_)};
    for (const auto& v : c_.basis.v) verts.push_back(v);
    s1_vertices_ = verts;
    Matrix m(d_, d_);
    for (int i = 0; i < d_; ++i) m.col(i) = c_.basis.v[static_cast<std::size_t>(i)];
    s1_volume_ = std::abs(m.determinant()) / factorial(d_);
    u_ = Vector::Zero(d_);
    for (const auto& v : c_.basis.v) u_ += v;
    u_ /= (d_ + 1.0);
    if (s1_volume_ > 0) e1_ = max_ellipsoid_in_simplex(Simplex(verts));

    degenerate_ = u_.norm() <= 1e-10;
    lambda_ = degenerate_ ? 1.0 : c_.w.norm() / (u_.norm() + c_.w.norm());
    if (s1_volume_ > 0) {
      const Vector center = degenerate_ ? e1_.center() : Vector(c_.w + lambda_ * (u_ - c_.w));
      e2_shape_ = lambda_ * e1_.shape();
      e2_center_ = center;
    }

    std::vector<int> g = c_.x_sources;
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    g_ = g;
  }

  void check_normalization() {
    const double tol = c_.tolerances.feasibility * scale_;
    double diff = 0.0, min_offset = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < normalized_.size(); ++i) {
      const auto& a = normalized_[i];
      const auto& b = c_.instance.normalized[i];
      diff = std::max({diff, (a.normal - b.normal).norm(), std::abs(a.offset - b.offset)});
      min_offset = std::min(min_offset, a.offset);
    }
    add("normalization", "normalized_matches_map", -diff, tol);
    add("normalization", "unit_ball_inside", min_offset - 1.0, tol);
    add("normalization", "map_invertible", std::abs(c_.instance.map.linear.determinant()) - 1e-12, 0.0);
  }

  void check_decomposition() {
    const auto& dec = c_.instance.decomposition;
    const auto rep = verify_decomposition(dec);
    const double tol = c_.tolerances.decomposition * scale_;
    add("eq1", "barycenter", -rep.barycenter, tol);
    add("eq1", "identity", -rep.identity, tol);
    add("eq1", "weight_sum", -rep.trace, tol);
    add("eq1", "weights_positive", rep.min_weight > 0 ? rep.min_weight : -1.0, 0.0);
    add("eq1", "unit_norm", -rep.unit_norm, 1e-8 * scale_);
    // Each point is the normal of an input half-space touching the unit ball.
    double worst = 0.0;
    const double band = c_.instance.contact_tolerance * scale_;
    for (std::size_t i = 0; i < dec.size(); ++i) {
      const auto& h = normalized_[static_cast<std::size_t>(dec.sources[i])];
      worst = std::max({worst, (h.normal - dec.points[i]).norm(), h.offset - 1.0 - band});
    }
    add("eq1", "points_are_contacts", -worst, c_.tolerances.incidence * scale_);
  }

  void check_basis() {
    const bool dr = c_.selector != "pivovarov";
    double ortho = 0.0, span = 0.0, lower = std::numeric_limits<double>::infinity(), upper = 0.0, prod = 1.0;
    double from_dec = 0.0;
    for (int i = 0; i < d_; ++i) {
      const auto& zi = c_.basis.z[static_cast<std::size_t>(i)];
      const auto& vi = c_.basis.v[static_cast<std::size_t>(i)];
      for (int j = 0; j < d_; ++j)
        ortho = std::max(ortho, std::abs(zi.dot(c_.basis.z[static_cast<std::size_t>(j)]) - (i == j ? 1.0 : 0.0)));
      for (int j = i + 1; j < d_; ++j) span = std::max(span, std::abs(vi.dot(c_.basis.z[static_cast<std::size_t>(j)])));
      const double diag = vi.dot(zi);
      lower = std::min(lower, diag - std::sqrt(double(d_ - i) / d_));
      upper = std::max(upper, diag - 1.0);
      prod *= diag;
      from_dec = std::max(from_dec,
                          (vi - c_.instance.decomposition.points[static_cast<std::size_t>(c_.basis.sources[static_cast<std::size_t>(i)])]).norm());
    }
    add("eq3", "orthonormal", -ortho, 1e-10 * scale_);
    add("eq3", "span", -span, 1e-8 * scale_);
    add("eq3", "lower_bounds", lower, 1e-9 * scale_, dr);
    add("eq3", "upper_bounds", -upper, 1e-12 * scale_);
    add("eq3", "basis_from_decomposition", -from_dec, 0.0);
    add("eq3", "volume_product", -std::abs(s1_volume_ * factorial(d_) - std::abs(prod)) / std::max(std::abs(prod), 1e-300),
        1e-9 * scale_);
  }

  void check_s1() {
    double vdiff = 0.0;
    for (std::size_t i = 0; i < s1_vertices_.size(); ++i) vdiff = std::max(vdiff, (s1_vertices_[i] - c_.s1.vertices[i]).norm());
    add("s1", "vertices", -vdiff, 0.0);
    add("s1", "u_centroid", -(c_.s1.u - u_).norm(), 1e-10 * scale_);
    double e1diff = std::numeric_limits<double>::infinity();
    if (s1_volume_ > 0) {
      const Matrix a = c_.s1.e1.shape() * c_.s1.e1.shape().transpose();
      const Matrix b = e1_.shape() * e1_.shape().transpose();
      e1diff = std::max((c_.s1.e1.center() - e1_.center()).norm(), (a - b).cwiseAbs().maxCoeff());
    }
    add("s1", "e1_maximal", -e1diff, 1e-9 * scale_);
    add("s1", "e1_center_is_u", -(c_.s1.e1.center() - c_.s1.u).norm(), 1e-10 * scale_);
    add("s1", "volume", -std::abs(c_.s1.volume - s1_volume_) / std::max(s1_volume_, 1e-300), 1e-9 * scale_);
    add("eq8", "simplex_volume_floor", s1_volume_ - simplex_volume_floor(d_), 1e-9 * scale_, c_.selector != "pivovarov");
  }

  void check_w() {
    const auto& q = c_.instance.decomposition.points;
    const double wn = c_.w.norm();
    if (degenerate_) {
      add("w", "on_ray", 0.0, 0.0, false);
    } else {
      add("w", "on_ray", -(c_.w / wn + u_ / u_.norm()).norm(), 1e-8 * scale_);
    }
    add("w", "norm_floor", wn - 1.0 / d_, 1e-8 * scale_);
    add("w", "in_hull", -hull_membership_residual(q, c_.w), 1e-8 * scale_);
    // Just outside along the ray must leave the hull; the gap is at least 1e-6/d.
    add("w", "on_boundary", hull_membership_residual(q, (1.0 + 1e-6) * c_.w) - 1e-9, 0.0);
  }

  void check_caratheodory() {
    const auto& q = c_.instance.decomposition.points;
    Vector rebuilt = Vector::Zero(d_);
    double sum = 0.0, min_coeff = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c_.caratheodory.indices.size(); ++j) {
      rebuilt += c_.caratheodory.coeffs[j] * q[static_cast<std::size_t>(c_.caratheodory.indices[j])];
      sum += c_.caratheodory.coeffs[j];
      min_coeff = std::min(min_coeff, c_.caratheodory.coeffs[j]);
    }
    add("caratheodory", "support_size", static_cast<double>(d_) - static_cast<double>(c_.caratheodory.indices.size()), 0.0);
    add("caratheodory", "reproduces_w", -std::max((rebuilt - c_.w).norm(), std::abs(sum - 1.0)), 1e-8 * scale_);
    add("caratheodory", "coefficients_nonnegative", min_coeff, 0.0);
  }

  void check_contraction() {
    add("eq4", "lambda_formula", -std::abs(c_.lambda - lambda_), 1e-10 * scale_);
    add("eq4", "lambda_bound", c_.lambda - 1.0 / (d_ + 1.0), 1e-9 * scale_);
    double diff = std::numeric_limits<double>::infinity();
    if (s1_volume_ > 0)
      diff = std::max((c_.e2.center() - e2_center_).norm(), (c_.e2.shape() - e2_shape_).cwiseAbs().maxCoeff());
    add("eq4", "e2_is_contraction", -diff, 1e-10 * scale_);
    add("eq4", "e2_centered", -e2_center_.norm(), 1e-10 * scale_);
  }

  void check_containments() {
    const double tol = 1e-8 * scale_;
    if (s1_volume_ <= 0) {
      add("eq5", "e2_in_s2", -std::numeric_limits<double>::infinity(), tol);
      add("eq5", "s2_in_conv_x", -std::numeric_limits<double>::infinity(), tol);
      add("eq6", "polar_in_e2_polar", -std::numeric_limits<double>::infinity(), tol);
      return;
    }
    std::vector<Vector> s2{c_.w};
    for (const auto& v : c_.basis.v) s2.push_back(v);
    if (degenerate_) s2.push_back(Vector::Zero(d_));
    double worst = std::numeric_limits<double>::infinity();
    try {
      const auto facets = facets_of_points(s2);
      for (const auto& h : facets.halfspaces())
        worst = std::min(worst, h.offset - (e2_center_.dot(h.normal) + (e2_shape_ * h.normal).norm()));
    } catch (const Error&) {
      worst = -std::numeric_limits<double>::infinity();
    }
    add("eq5", "e2_in_s2", worst, tol);

    double hull = 0.0;
    for (const auto& p : s2) hull = std::max(hull, hull_membership_residual(c_.x, p));
    add("eq5", "s2_in_conv_x", -hull, tol);

    // Vertices y of X* must satisfy |A2 y| <= 1.
    double polar = -std::numeric_limits<double>::infinity();
    try {
      const auto xv = vertex_enumeration(polar_of_points(c_.x));
      polar = std::numeric_limits<double>::infinity();
      for (const auto& y : xv.vertices) polar = std::min(polar, 1.0 - (e2_shape_ * y).norm());
    } catch (const Error&) {
    }
    add("eq6", "polar_in_e2_polar", polar, tol);
  }

  void check_subfamily() {
    add("subfamily", "x_size", 2.0 * d_ - static_cast<double>(c_.x.size()), 0.0);
    add("subfamily", "g_size", 2.0 * d_ - static_cast<double>(c_.subfamily.size()), 0.0);
    add("subfamily", "g_matches_x", c_.subfamily == g_ ? 0.0 : -1.0, 0.0);
    // X comes from the Caratheodory vertices and v_1..v_d.
    const auto& q = c_.instance.decomposition.points;
    double from = 0.0;
    for (const auto& x : c_.x) {
      double best = std::numeric_limits<double>::infinity();
      for (int i : c_.caratheodory.indices) best = std::min(best, (x - q[static_cast<std::size_t>(i)]).norm());
      for (const auto& v : c_.basis.v) best = std::min(best, (x - v).norm());
      from = std::max(from, best);
    }
    add("subfamily", "x_from_construction", -from, c_.tolerances.dedupe * scale_);
    // Each x supports the unit ball and maps back to its input half-space.
    double worst = 0.0;
    const double band = c_.instance.contact_tolerance * scale_;
    for (std::size_t i = 0; i < c_.x.size(); ++i) {
      const auto src = static_cast<std::size_t>(c_.x_sources[i]);
      const auto& h = normalized_[src];
      const HalfSpace back = transform_halfspace({c_.x[i], h.offset}, c_.instance.map);
      const auto& orig = c_.instance.original[src];
      worst = std::max({worst, (h.normal - c_.x[i]).norm(), h.offset - 1.0 - band, (back.normal - orig.normal).norm(),
                        std::abs(back.offset - orig.offset) / std::max(1.0, std::abs(orig.offset))});
    }
    add("subfamily", "g_subset_f", -worst, c_.tolerances.feasibility * scale_);
  }

  void check_ratio() {
    const double rel = 1e-9 * scale_;
    double vf = std::numeric_limits<double>::quiet_NaN(), vg = vf;
    try {
      vf = volume(normalized_);
      std::vector<HalfSpace> g;
      for (int i : g_) g.push_back(normalized_[static_cast<std::size_t>(i)]);
      vg = volume(HPolytope(d_, std::move(g)));
    } catch (const Error&) {
    }
    const double ratio = vg / vf;
    add("ratio", "volume_f", -std::abs(c_.volume_f - vf) / vf, rel);
    add("ratio", "volume_g", -std::abs(c_.volume_g - vg) / vg, rel);
    add("ratio", "ratio_consistent", -std::abs(c_.ratio - ratio) / ratio, rel);
    add("ratio", "bound_value", -std::abs(c_.bound - explicit_bound(d_)) / explicit_bound(d_), 1e-12);
    const double limit = c_.selector == "pivovarov" ? ratio_bound_for_simplex(d_, s1_volume_) : explicit_bound(d_);
    add("ratio", "ratio_bound", (limit - ratio) / limit, rel);
  }

  const Certificate& c_;
  double scale_;
  int d_;
  CheckReport report_;
  HPolytope normalized_;
  std::vector<Vector> s1_vertices_;
  double s1_volume_ = 0.0;
  Vector u_;
  Ellipsoid e1_;
  bool degenerate_ = false;
  double lambda_ = 1.0;
  Vector e2_center_;
  Matrix e2_shape_;
  std::vector<int> g_;
};

}  // namespace detail

// Independent re-check of every inequality recorded in a certificate. Uses only geometry
// primitives; nothing derived by the producer is trusted. Tolerances are the producer's
// scaled by `tol_scale`.
inline CheckReport check_certificate(const Certificate& cert, double tol_scale = 10.0) {
  return detail::CertificateChecker(cert, tol_scale).run();
}

}  // namespace qhelly
