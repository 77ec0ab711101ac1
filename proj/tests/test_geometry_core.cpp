#include "oracles.hpp"
#include "qhelly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qhelly;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

HPolytope cube(int d) { return gen_cube(d).to_polytope(); }

bool has_point(const std::vector<Vector>& pts, const Vector& p, double tol = 1e-9) {
  for (const auto& q : pts)
    if ((p - q).norm() <= tol) return true;
  return false;
}

}  // namespace

TEST(NormalizeHalfspace, ScalesToUnitNormal) {
  auto h = normalize_halfspace(vec({2, 0}), 4);
  EXPECT_NEAR(h.normal(0), 1.0, 1e-15);
  EXPECT_NEAR(h.offset, 2.0, 1e-15);
  h = normalize_halfspace(vec({0, 1}), 1);
  EXPECT_EQ(h.normal, vec({0, 1}));
  EXPECT_EQ(h.offset, 1.0);
  h = normalize_halfspace(vec({3, 4}), 10);
  EXPECT_NEAR(h.normal(0), 0.6, 1e-15);
  EXPECT_NEAR(h.normal(1), 0.8, 1e-15);
  EXPECT_NEAR(h.offset, 2.0, 1e-15);
  EXPECT_NEAR(std::abs(h.normal.norm() - 1.0), 0.0, 1e-12);
}

TEST(NormalizeHalfspace, RejectsZeroNormal) {
  try {
    normalize_halfspace(vec({1e-15, 0}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroNormal);
  }
}

TEST(HPolytopeCaps, DimensionAndFacetLimits) {
  EXPECT_THROW(gen_cube(9), Error);
  std::vector<HalfSpace> many(65, HalfSpace{vec({1, 0}), 1});
  EXPECT_THROW(HPolytope(2, many), Error);
}

TEST(LpSolve, TextbookCases) {
  LinearProgram box(2);
  box.objective = vec({1, 0});
  box.a_ub = cube(2).normals();
  box.b_ub = cube(2).offsets();
  auto r = lp_solve(box);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);

  LinearProgram tri(2);
  tri.objective = vec({1, 1});
  tri.a_ub = Matrix(1, 2);
  tri.a_ub << 1, 1;
  tri.b_ub = vec({1});
  tri.nonnegative = {true, true};
  r = lp_solve(tri);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(LpSolve, InfeasibleAndUnbounded) {
  LinearProgram lp(1);
  lp.objective = vec({1});
  lp.a_ub = Matrix(2, 1);
  lp.a_ub << 1, -1;
  lp.b_ub = vec({-1, -1});  // x <= -1 and x >= 1
  EXPECT_EQ(lp_solve(lp).status, LpStatus::Infeasible);

  LinearProgram up(1);
  up.objective = vec({1});
  up.a_ub = Matrix(1, 1);
  up.a_ub << -1;
  up.b_ub = vec({0});
  EXPECT_EQ(lp_solve(up).status, LpStatus::Unbounded);
}

TEST(LpSolve, EqualityConstraints) {
  LinearProgram lp(3);
  lp.objective = vec({1, 2, 3});
  lp.nonnegative = {true, true, true};
  lp.a_eq = Matrix(1, 3);
  lp.a_eq << 1, 1, 1;
  lp.b_eq = vec({1});
  auto r = lp_solve(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.value, 3.0, 1e-12);
  EXPECT_NEAR(r.x(2), 1.0, 1e-12);
}

TEST(LpSolve, MatchesBruteForceVertexScan) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto p = gen_tangent_random(3, 10, seed).to_polytope();
    Rng rng = make_rng(seed, 99);
    LinearProgram lp(3);
    lp.objective = random_gaussian(rng, 3);
    lp.a_ub = p.normals();
    lp.b_ub = p.offsets();
    const auto r = lp_solve(lp);
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR(r.value, oracle::brute_force_lp_max(lp.objective, lp.a_ub, lp.b_ub), 1e-9) << "seed " << seed;
  }
}

TEST(Nnls, RecoversNonnegativeSolution) {
  Rng rng = make_rng(3);
  Matrix a(8, 5);
  for (int j = 0; j < 5; ++j) a.col(j) = random_gaussian(rng, 8);
  const Vector x = vec({0.5, 0, 2, 0, 1});
  const auto r = nnls(a, a * x);
  EXPECT_LE((r.x - x).norm(), 1e-10);
  EXPECT_LE(r.residual_norm, 1e-10);
}

TEST(Nnls, ClampsNegativeDirections) {
  Matrix a = Matrix::Identity(2, 2);
  const auto r = nnls(a, vec({1, -1}));
  EXPECT_NEAR(r.x(0), 1.0, 1e-14);
  EXPECT_EQ(r.x(1), 0.0);
  EXPECT_NEAR(r.residual_norm, 1.0, 1e-14);
}

TEST(VertexEnumeration, SquareAndSimplex) {
  const auto sq = vertex_enumeration(cube(2));
  ASSERT_EQ(sq.vertices.size(), 4u);
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0}) EXPECT_TRUE(has_point(sq.vertices, vec({x, y})));

  const auto tri = vertex_enumeration(make_hpolytope(2, (Matrix(3, 2) << -1, 0, 0, -1, 1, 1).finished(), vec({0, 0, 1})));
  ASSERT_EQ(tri.vertices.size(), 3u);
  EXPECT_TRUE(has_point(tri.vertices, vec({0, 0})));
  EXPECT_TRUE(has_point(tri.vertices, vec({1, 0})));
  EXPECT_TRUE(has_point(tri.vertices, vec({0, 1})));
}

TEST(VertexEnumeration, MatchesAngularSweep) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto doc = gen_tangent_random(2, 8, seed);
    std::vector<Vector> normals;
    std::vector<double> offsets;
    for (const auto& r : doc.halfspaces) {
      normals.push_back(r.a);
      offsets.push_back(r.b);
    }
    const auto expect = oracle::angular_sweep(normals, offsets);
    const auto got = vertex_enumeration(doc.to_polytope());
    ASSERT_EQ(got.vertices.size(), expect.size()) << "seed " << seed;
    for (const auto& p : expect) EXPECT_TRUE(has_point(got.vertices, Vector(p), 1e-9));
  }
}

TEST(VertexEnumeration, ErrorsOnBadBodies) {
  auto kind_of = [](const HPolytope& p) {
    try {
      vertex_enumeration(p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::MalformedInput;
  };
  Matrix a(2, 2);
  a << 1, 0, 0, 1;
  EXPECT_EQ(kind_of(make_hpolytope(2, a, vec({1, 1}))), ErrorKind::Unbounded);
  Matrix b(2, 1);
  b << 1, -1;
  EXPECT_EQ(kind_of(make_hpolytope(1, b, vec({-1, -1}))), ErrorKind::Empty);
  Matrix c(4, 2);
  c << 1, 0, -1, 0, 0, 1, 0, -1;
  EXPECT_EQ(kind_of(make_hpolytope(2, c, vec({1, 1, 0, 0}))), ErrorKind::Degenerate);
}

TEST(Volume, ClosedForms) {
  EXPECT_NEAR(volume(cube(2)), 4.0, 1e-12);
  EXPECT_NEAR(volume(cube(3)), 8.0, 1e-12);
  EXPECT_NEAR(volume(cube(4)), 16.0, 1e-11);
  VPolytope cross{{vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})}};
  EXPECT_NEAR(volume(cross), 2.0, 1e-12);
  VPolytope octa{{vec({1, 0, 0}), vec({-1, 0, 0}), vec({0, 1, 0}), vec({0, -1, 0}), vec({0, 0, 1}), vec({0, 0, -1})}};
  EXPECT_NEAR(volume(octa), 4.0 / 3.0, 1e-12);
}

TEST(Volume, MatchesShoelace) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto doc = gen_tangent_random(2, 3 + static_cast<int>(seed % 10), seed);
    std::vector<Vector> normals;
    std::vector<double> offsets;
    for (const auto& r : doc.halfspaces) {
      normals.push_back(r.a);
      offsets.push_back(r.b);
    }
    const double area = oracle::shoelace(oracle::angular_sweep(normals, offsets));
    EXPECT_NEAR(volume(doc.to_polytope()) / area, 1.0, 1e-9) << "seed " << seed;
  }
}

TEST(Volume, HAndVFormsAgree) {
  for (int d = 2; d <= 4; ++d)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p = gen_tangent_random(d, 2 * d + 2, seed).to_polytope();
      const double vh = volume(p);
      const double vv = volume(vertex_enumeration(p));
      EXPECT_NEAR(vh / vv, 1.0, 1e-9);
    }
}

TEST(Volume, ScalesWithDeterminant) {
  for (int d = 2; d <= 4; ++d) {
    const auto doc = gen_tangent_random(d, d + 3, 40 + static_cast<std::uint64_t>(d));
    Rng rng = make_rng(7, static_cast<std::uint64_t>(d));
    Matrix t(d, d);
    for (int j = 0; j < d; ++j) t.col(j) = random_gaussian(rng, d);
    const auto warped = gen_affine_warp(doc, t, Vector::Zero(d));
    EXPECT_NEAR(volume(warped.to_polytope()) / (std::abs(t.determinant()) * volume(doc.to_polytope())), 1.0, 1e-9);
  }
}

TEST(PolarOfPoints, CrossPolytopeGivesCube) {
  std::vector<Vector> x{vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})};
  EXPECT_NEAR(volume(polar_of_points(x)), 4.0, 1e-12);
  for (int d = 2; d <= 4; ++d) {
    std::vector<Vector> pts;
    for (int i = 0; i < d; ++i)
      for (double s : {1.0, -1.0}) pts.push_back(s * Vector::Unit(d, i));
    const auto v = vertex_enumeration(polar_of_points(pts));
    EXPECT_EQ(v.vertices.size(), std::size_t(1) << d);
    for (const auto& p : v.vertices) EXPECT_NEAR(p.cwiseAbs().minCoeff(), 1.0, 1e-12);
  }
}

TEST(PolarOfPoints, WedgeIsUnbounded) {
  std::vector<Vector> x{vec({1, 0}), vec({0, 1})};
  try {
    volume(polar_of_points(x));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unbounded);
  }
}

TEST(PolarOfPoints, HexagonArea) {
  std::vector<Vector> x;
  for (int k = 0; k < 6; ++k) x.push_back(vec({std::cos(k * std::numbers::pi / 3), std::sin(k * std::numbers::pi / 3)}));
  const auto p = polar_of_points(x);
  EXPECT_NEAR(volume(p), 2.0 * std::sqrt(3.0), 1e-12);
  for (const auto& v : vertex_enumeration(p).vertices) EXPECT_NEAR(v.norm(), 2.0 / std::sqrt(3.0), 1e-12);
}

TEST(PolarOfPoints, RejectsOrigin) {
  std::vector<Vector> x{vec({1, 0}), vec({0, 0})};
  try {
    polar_of_points(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroPoint);
  }
}

TEST(Ellipsoid, Volumes) {
  EXPECT_NEAR(ellipsoid_volume(Ellipsoid::unit_ball(2)), std::numbers::pi, 1e-14);
  EXPECT_NEAR(ellipsoid_volume(Ellipsoid(Vector::Zero(2), vec({2, 3}).asDiagonal())), 6 * std::numbers::pi, 1e-13);
}

TEST(Ellipsoid, VolumeMatchesMonteCarlo) {
  for (int d = 2; d <= 3; ++d) {
    Rng rng = make_rng(11, static_cast<std::uint64_t>(d));
    Matrix g(d, d);
    for (int j = 0; j < d; ++j) g.col(j) = random_gaussian(rng, d);
    const Matrix shape = sym_sqrt(g * g.transpose() + 0.1 * Matrix::Identity(d, d));
    const auto mc = oracle::monte_carlo_ellipsoid_volume(shape, 400000, 5);
    EXPECT_NEAR(ellipsoid_volume(Ellipsoid(Vector::Zero(d), shape)), mc.value, 3 * mc.sigma);
  }
}

TEST(Ellipsoid, RejectsNonSpd) {
  EXPECT_THROW(Ellipsoid(Vector::Zero(2), vec({1, 0}).asDiagonal()), Error);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(Ellipsoid(Vector::Zero(2), asym), Error);
}

TEST(EllipsoidPolar, ReciprocalAxesAndInvolution) {
  const auto b = ellipsoid_polar(Ellipsoid::unit_ball(3));
  EXPECT_LE((b.shape() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
  const auto e = ellipsoid_polar(Ellipsoid(Vector::Zero(2), vec({2, 0.5}).asDiagonal()));
  EXPECT_NEAR(e.shape()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(e.shape()(1, 1), 2.0, 1e-15);

  for (int d = 2; d <= 5; ++d) {
    Rng rng = make_rng(21, static_cast<std::uint64_t>(d));
    Matrix g(d, d);
    for (int j = 0; j < d; ++j) g.col(j) = random_gaussian(rng, d);
    const Ellipsoid x(Vector::Zero(d), sym_sqrt(g * g.transpose() + Matrix::Identity(d, d)));
    const auto xs = ellipsoid_polar(x);
    const double kd = unit_ball_volume(d);
    EXPECT_NEAR(ellipsoid_volume(x) * ellipsoid_volume(xs) / (kd * kd), 1.0, 1e-9);
    EXPECT_LE((ellipsoid_polar(xs).shape() - x.shape()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(EllipsoidPolar, RequiresCenteredInput) {
  try {
    ellipsoid_polar(Ellipsoid(vec({0.1, 0}), Matrix::Identity(2, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCentered);
  }
}

TEST(Simplex, RejectsDegenerate) {
  try {
    Simplex({vec({0, 0}), vec({1, 1}), vec({2, 2})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSimplex);
  }
}

TEST(MaxEllipsoidInSimplex, EquilateralTriangle) {
  const auto ref = oracle::regular_simplex_vertices(2);
  std::vector<Vector> v(ref.begin(), ref.end());
  const auto e = max_ellipsoid_in_simplex(Simplex(v));
  EXPECT_LE(e.center().norm(), 1e-14);
  EXPECT_LE((e.shape() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MaxEllipsoidInSimplex, VolumeRatioClosedForm) {
  EXPECT_NEAR(simplex_ellipsoid_ratio(2), std::numbers::pi / (3 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(simplex_ellipsoid_ratio(2), 0.604600, 5e-7);
  EXPECT_NEAR(simplex_ellipsoid_ratio(3), 6 * (4 * std::numbers::pi / 3) / (std::pow(3.0, 1.5) * 16), 1e-15);
  EXPECT_NEAR(simplex_ellipsoid_ratio(3), 0.302300, 5e-7);
  for (int d = 2; d <= 5; ++d) {
    Rng rng = make_rng(31, static_cast<std::uint64_t>(d));
    std::vector<Vector> v;
    for (int i = 0; i <= d; ++i) v.push_back(random_gaussian(rng, d));
    const Simplex s(v);
    const auto e = max_ellipsoid_in_simplex(s);
    EXPECT_NEAR(ellipsoid_volume(e) / s.volume(), simplex_ellipsoid_ratio(d), 1e-9 * simplex_ellipsoid_ratio(d));
    EXPECT_LE((e.center() - s.centroid()).norm(), 1e-12);
  }
}

TEST(MaxEllipsoidInSimplex, AffineEquivariance) {
  for (int d = 2; d <= 4; ++d) {
    Rng rng = make_rng(41, static_cast<std::uint64_t>(d));
    std::vector<Vector> v;
    for (int i = 0; i <= d; ++i) v.push_back(random_gaussian(rng, d));
    Matrix t(d, d);
    for (int j = 0; j < d; ++j) t.col(j) = random_gaussian(rng, d);
    const Vector shift = random_gaussian(rng, d);
    std::vector<Vector> tv;
    for (const auto& p : v) tv.push_back(t * p + shift);
    const auto e = max_ellipsoid_in_simplex(Simplex(v));
    const auto te = max_ellipsoid_in_simplex(Simplex(tv));
    EXPECT_LE((te.center() - (t * e.center() + shift)).norm(), 1e-9);
    const Matrix expect = t * e.shape() * e.shape().transpose() * t.transpose();
    EXPECT_LE((te.shape() * te.shape().transpose() - expect).cwiseAbs().maxCoeff(), 1e-9);
  }
}
