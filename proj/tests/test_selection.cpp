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

ContactDecomposition cube_decomposition(int d) {
  const auto pts = contact_points(gen_cube(d).to_polytope());
  return make_decomposition(pts, john_weights(pts));
}

ContactDecomposition simplex_decomposition(int d) {
  const auto ref = oracle::regular_simplex_vertices(d);
  std::vector<Vector> pts(ref.begin(), ref.end());
  return make_decomposition(pts, john_weights(pts));
}

void expect_eq3(const DRBasis& b, double slack = 1e-9) {
  const int d = static_cast<int>(b.z.size());
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    for (int j = 0; j < d; ++j) EXPECT_NEAR(b.z[k].dot(b.z[static_cast<std::size_t>(j)]), i == j ? 1.0 : 0.0, 1e-10);
    for (int j = i + 1; j < d; ++j) EXPECT_LE(std::abs(b.v[k].dot(b.z[static_cast<std::size_t>(j)])), 1e-8);
    const double diag = b.v[k].dot(b.z[k]);
    EXPECT_GE(diag, std::sqrt(double(d - i) / d) - slack);
    EXPECT_LE(diag, 1.0 + 1e-12);
  }
}

}  // namespace

TEST(TracePick, IdentityAndCubeProjection) {
  const auto dec = cube_decomposition(2);
  EXPECT_LT(trace_pick(Matrix::Identity(2, 2), dec), dec.size());
  const Matrix t = Matrix::Identity(2, 2) - Vector::Unit(2, 0) * Vector::Unit(2, 0).transpose();
  const auto& w = dec.points[trace_pick(t, dec)];
  EXPECT_NEAR(std::abs(w(1)), 1.0, 1e-15);
}

TEST(TracePick, BeatsAverageAndMatchesExhaustiveScan) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int d = 2 + static_cast<int>(seed % 4);
    const auto dec = random_decomposition(d, 2 * d + 1, seed);
    Rng rng = make_rng(seed, 5);
    const int r = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(d));
    const Matrix q = random_orthogonal(rng, d).leftCols(r);
    const Matrix t = q * q.transpose();
    const auto pick = trace_pick(t, dec);
    double best = -1.0;
    for (const auto& w : dec.points) best = std::max(best, w.dot(t * w));
    const double got = dec.points[pick].dot(t * dec.points[pick]);
    EXPECT_EQ(got, best);
    EXPECT_GE(got, t.trace() / d - 1e-9);
  }
}

TEST(TracePick, TiesGoToSmallestIndex) {
  const auto dec = cube_decomposition(3);
  EXPECT_EQ(trace_pick(Matrix::Identity(3, 3), dec), 0u);
}

TEST(DrSelect, CubeGivesOrthonormalPicks) {
  for (int d = 1; d <= 5; ++d) {
    const auto b = dr_select(cube_decomposition(d));
    for (int i = 0; i < d; ++i) EXPECT_NEAR(b.v[static_cast<std::size_t>(i)].dot(b.z[static_cast<std::size_t>(i)]), 1.0, 1e-15);
    expect_eq3(b);
  }
}

TEST(DrSelect, FirstPickIsFirstContact) {
  const auto dec = random_decomposition(3, 8, 4);
  const auto b = dr_select(dec);
  EXPECT_EQ(b.sources.front(), 0);
  EXPECT_EQ(b.v.front(), dec.points.front());
}

TEST(DrSelect, RegularTriangle) {
  const auto b = dr_select(simplex_decomposition(2));
  EXPECT_NEAR(b.v[1].dot(b.z[1]), std::sqrt(3.0) / 2, 1e-12);
  expect_eq3(b);
}

TEST(DrSelect, RandomBalancedDecompositions) {
  for (int d = 2; d <= 6; ++d)
    for (std::uint64_t seed = 0; seed < 40; ++seed) expect_eq3(dr_select(random_decomposition(d, d + 1 + static_cast<int>(seed % 8), seed)));
}

TEST(DrSelect, RandomUnbalancedDecompositions) {
  int off_center = 0;
  for (int d = 2; d <= 6; ++d)
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto dec = random_decomposition(d, d + 1 + static_cast<int>(seed % 8), seed, false);
      const auto rep = verify_decomposition(dec);
      EXPECT_LE(rep.identity, 1e-10);
      if (rep.barycenter > 1e-3) ++off_center;
      expect_eq3(dr_select(dec));
    }
  EXPECT_GT(off_center, 100);
}

TEST(DrSelect, RejectsInvalidDecomposition) {
  ContactDecomposition dec;
  dec.points = {vec({1, 0}), vec({1, 0}), vec({0.8, 0.6})};
  dec.weights = {1.0, 0.9, 0.1};
  dec.sources = {0, 1, 2};
  try {
    dr_select(dec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NumericalBreakdown);
  }
}

TEST(BuildS1, CubeBasis) {
  for (int d = 2; d <= 4; ++d) {
    const auto s1 = build_s1(dr_select(cube_decomposition(d)));
    EXPECT_NEAR(s1.volume, 1.0 / factorial(d), 1e-15);
    Vector u = Vector::Zero(d);
    for (std::size_t i = 1; i < s1.vertices.size(); ++i) u += s1.vertices[i];
    EXPECT_LE((s1.u - u / (d + 1)).norm(), 1e-15);
    EXPECT_NEAR(s1.u.cwiseAbs().sum(), double(d) / (d + 1), 1e-15);
  }
  const auto s1 = build_s1(dr_select(cube_decomposition(2)));
  EXPECT_NEAR(ellipsoid_volume(s1.e1) / s1.volume, std::numbers::pi / (3 * std::sqrt(3.0)), 1e-12);
}

TEST(BuildS1, VolumeIsProductOfDiagonal) {
  for (int d = 2; d <= 6; ++d)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto b = dr_select(random_decomposition(d, 2 * d, seed));
      const auto s1 = build_s1(b);
      double prod = 1.0;
      for (int i = 0; i < d; ++i) prod *= b.v[static_cast<std::size_t>(i)].dot(b.z[static_cast<std::size_t>(i)]);
      EXPECT_NEAR(s1.volume * factorial(d) / prod, 1.0, 1e-9);
      EXPECT_GE(s1.volume, simplex_volume_floor(d) - 1e-9);
    }
}

TEST(RayHitBoundary, CrossPolytopeEdge) {
  std::vector<Vector> q{vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})};
  const auto hit = ray_hit_boundary(q, vec({1, 1}) / std::sqrt(2.0));
  EXPECT_NEAR(hit.t, 1 / std::sqrt(2.0), 1e-12);
  EXPECT_LE((hit.w - vec({0.5, 0.5})).norm(), 1e-12);
  const auto vertex = ray_hit_boundary(q, vec({1, 0}));
  EXPECT_LE((vertex.w - vec({1, 0})).norm(), 1e-12);
}

TEST(RayHitBoundary, RandomHullsAndDirections) {
  for (int d = 2; d <= 5; ++d)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto dec = random_decomposition(d, 2 * d + 1, seed);
      Rng rng = make_rng(seed, 3);
      const Vector dir = random_unit_vector(rng, d);
      const auto hit = ray_hit_boundary(dec.points, dir);
      EXPECT_GE(hit.t, 1.0 / d - 1e-8);
      EXPECT_LE(hull_membership_residual(dec.points, hit.w), 1e-9);
      EXPECT_GT(hull_membership_residual(dec.points, (1 + 1e-6) * hit.w), 1e-12);
      Vector rebuilt = Vector::Zero(d);
      for (std::size_t j = 0; j < dec.size(); ++j) rebuilt += hit.coeffs[j] * dec.points[j];
      EXPECT_LE((rebuilt - hit.w).norm(), 1e-9);
    }
}

TEST(Caratheodory, AlreadySmallAndVertex) {
  std::vector<Vector> q{vec({1, 0}), vec({0, 1}), vec({-1, 0}), vec({0, -1})};
  auto r = caratheodory_reduce(vec({0.5, 0.5}), q, {0.5, 0.5, 0, 0});
  EXPECT_EQ(r.indices.size(), 2u);
  EXPECT_NEAR(r.coeffs[0], 0.5, 1e-15);
  r = caratheodory_reduce(vec({1, 0}), q, {1, 0, 0, 0});
  ASSERT_EQ(r.indices.size(), 1u);
  EXPECT_EQ(r.indices[0], 0);
  EXPECT_NEAR(r.coeffs[0], 1.0, 1e-15);
}

TEST(Caratheodory, ReducesRedundantFacetCombination) {
  // Four corners of the facet x = 1 of the 3-cube.
  std::vector<Vector> q{vec({1, 1, 1}), vec({1, -1, 1}), vec({1, 1, -1}), vec({1, -1, -1}), vec({-1, 0, 0})};
  const std::vector<double> mu{0.25, 0.25, 0.25, 0.25, 0.0};
  const Vector w = vec({1, 0, 0});
  const auto r = caratheodory_reduce(w, q, mu);
  EXPECT_LE(r.indices.size(), 3u);
  Vector rebuilt = Vector::Zero(3);
  double sum = 0.0;
  for (std::size_t j = 0; j < r.indices.size(); ++j) {
    EXPECT_GT(r.coeffs[j], 0.0);
    rebuilt += r.coeffs[j] * q[static_cast<std::size_t>(r.indices[j])];
    sum += r.coeffs[j];
  }
  EXPECT_LE((rebuilt - w).norm(), 1e-8);
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Caratheodory, InteriorPointFails) {
  // An interior point cannot be written with only d hull vertices in general position.
  std::vector<Vector> q{vec({1, 0}), vec({0, 1}), vec({-1, -1})};
  try {
    caratheodory_reduce(vec({0, 0}), q, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ReductionFailed);
  }
}

TEST(ContractE1, Arithmetic) {
  const Ellipsoid e1(vec({0.2, 0}), 0.1 * Matrix::Identity(2, 2));
  const auto c = contract_e1(e1, vec({0.2, 0}), vec({-0.5, 0}));
  EXPECT_NEAR(c.lambda, 5.0 / 7.0, 1e-15);
  EXPECT_LE(c.e2.center().norm(), 1e-15);
  EXPECT_NEAR(c.e2.shape()(0, 0), 0.5 / 7.0, 1e-15);
}

TEST(ContractE1, DegenerateCenter) {
  const Ellipsoid e1(Vector::Zero(2), 0.3 * Matrix::Identity(2, 2));
  const auto c = contract_e1(e1, Vector::Zero(2), vec({0, 1}));
  EXPECT_EQ(c.lambda, 1.0);
  EXPECT_EQ(c.e2.shape(), e1.shape());
}

TEST(ContractE1, Misaligned) {
  const Ellipsoid e1(vec({0.2, 0}), 0.1 * Matrix::Identity(2, 2));
  try {
    contract_e1(e1, vec({0.2, 0}), vec({0, -0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Misaligned);
  }
}

TEST(Select, CubeKeepsAllFacets) {
  for (int d = 2; d <= 4; ++d) {
    const auto cert = select(gen_cube(d).to_polytope());
    EXPECT_LE(cert.subfamily.size(), std::size_t(2 * d));
    EXPECT_NEAR(cert.ratio, 1.0, 1e-9);
    EXPECT_LE(cert.ratio, explicit_bound(d));
    EXPECT_TRUE(check_certificate(cert).pass());
  }
}

TEST(Select, SimplexInput) {
  for (int d = 2; d <= 4; ++d) {
    Rng rng = make_rng(13, static_cast<std::uint64_t>(d));
    std::vector<Vector> v;
    for (int i = 0; i <= d; ++i) v.push_back(random_gaussian(rng, d));
    const auto cert = select(facets_of_points(v));
    EXPECT_LE(cert.subfamily.size(), std::size_t(d + 1));
    EXPECT_LE(cert.ratio, explicit_bound(d));
    EXPECT_TRUE(check_certificate(cert).pass());
  }
}

TEST(Select, RandomInstancesRespectBound) {
  for (int d = 2; d <= 4; ++d)
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      auto doc = gen_tangent_random(d, d + 2 + static_cast<int>(seed % (2 * d - 1)), seed);
      if (seed % 3 == 0) doc = gen_affine_warp(doc, seed);
      const auto cert = select(doc.to_polytope());
      EXPECT_LE(cert.subfamily.size(), std::size_t(2 * d));
      EXPECT_LE(cert.ratio, explicit_bound(d));
      EXPECT_GE(cert.lambda, 1.0 / (d + 1) - 1e-9);
      EXPECT_GE(cert.w.norm(), 1.0 / d - 1e-8);
      EXPECT_TRUE(std::is_sorted(cert.subfamily.begin(), cert.subfamily.end()));
    }
}

TEST(Select, DeterministicGivenInput) {
  const auto p = gen_tangent_random(3, 8, 17).to_polytope();
  const auto a = certificate_to_json(select(p)).dump();
  const auto b = certificate_to_json(select(p)).dump();
  EXPECT_EQ(a, b);
}

TEST(Select, WrapsStageErrors) {
  Matrix a(2, 2);
  a << 1, 0, 0, 1;
  try {
    select(make_hpolytope(2, a, vec({1, 1})));
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "normalize_position");
    EXPECT_EQ(e.kind(), ErrorKind::Unbounded);
  }
}

TEST(Pivovarov, OneDimensionalVolumeIsOne) {
  const auto dec = cube_decomposition(1);
  const auto m = pivovarov_moments(dec, 100, 3);
  EXPECT_EQ(m.mean_volume, 1.0);
  EXPECT_EQ(m.se_mean_volume, 0.0);
  EXPECT_NEAR(m.mean_volume, simplex_volume_floor(1), 1e-15);
}

TEST(Pivovarov, ExactMomentsOnSquare) {
  const auto dec = cube_decomposition(2);
  const auto [m1, m2] = oracle::planar_pick_moments(dec.points, dec.weights);
  EXPECT_NEAR(m1, 0.25, 1e-15);
  EXPECT_NEAR(m2, 0.125, 1e-15);
  const auto ex = pivovarov_exact_moments(dec);
  EXPECT_NEAR(ex.mean_volume, m1, 1e-15);
  EXPECT_NEAR(ex.mean_volume_sq, m2, 1e-15);
  EXPECT_NEAR(std::sqrt(ex.mean_volume_sq), simplex_volume_floor(2), 1e-15);
}

TEST(Pivovarov, MonteCarloWithinThreeSigma) {
  const auto dec = cube_decomposition(2);
  const auto m = pivovarov_moments(dec, 20000, 11);
  EXPECT_NEAR(m.mean_volume, 0.25, 3 * m.se_mean_volume);
  EXPECT_NEAR(m.rms_volume, 1 / (2 * std::sqrt(2.0)), 3 * m.se_rms_volume);
}

TEST(Pivovarov, SamplesAreReproducible) {
  const auto dec = random_decomposition(3, 7, 2);
  const auto a = pivovarov_sample(dec, 42);
  const auto b = pivovarov_sample(dec, 42);
  EXPECT_EQ(a.indices, b.indices);
  EXPECT_EQ(a.volume, b.volume);
}

TEST(Pivovarov, SelectorProducesCheckedCertificates) {
  for (int d = 2; d <= 4; ++d)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p = gen_tangent_random(d, 2 * d + 1, seed).to_polytope();
      const auto cert = select(p, {Selector::Pivovarov, seed, {}});
      EXPECT_EQ(cert.selector, "pivovarov");
      const auto rep = check_certificate(cert);
      EXPECT_TRUE(rep.pass());
      EXPECT_FALSE(rep.find("lower_bounds")->applicable);
    }
}
