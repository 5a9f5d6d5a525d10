#include "meshpatch/sampler.hpp"
#include "meshpatch/shapes.hpp"
#include "meshpatch/simplify.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace meshpatch;
using meshpatch::testing::expect_error;

namespace {

std::vector<CandidatePoint> with_jacobians(const std::vector<double>& js) {
  std::vector<CandidatePoint> c(js.size());
  for (std::size_t i = 0; i < js.size(); ++i) {
    c[i].sub_area = static_cast<int>(i);
    c[i].jacobian = js[i];
  }
  return c;
}

// Identity trace whose M^L is `original` and whose M^0 has the same connectivity at `coarse` positions.
SimplificationTrace paired_trace(const IndexedMesh& original, const IndexedMesh& coarse) {
  SimplificationTrace t = identity_trace(coarse);
  t.original = original;
  return t;
}

}  // namespace

TEST(Candidates, OnePerStratum) {
  const SubdividedTopology topo = subdivide(4, 2);
  Rng rng(1);
  EXPECT_EQ(stratified_candidates(topo, {1, 5}, 0, rng).size(), 1u);
  const auto c = stratified_candidates(topo, {1, 5}, 3, rng);
  ASSERT_EQ(c.size(), 64u);
  for (int s = 0; s < 64; ++s) {
    EXPECT_EQ(c[s].sub_area, s);
    EXPECT_EQ(c[s].unit.coarse_face, 1);
    EXPECT_NEAR(c[s].bary_on_coarse.sum(), 1.0, 1e-14);
    // The stratum index extends the unit's quadrant path by three digits.
    EXPECT_EQ(coarse_bary_to_unit(2 + 3, c[s].bary_on_coarse).local, (5 << 6) | s);
  }
}

TEST(Candidates, MeanConvergesToUnitCentroid) {
  const SubdividedTopology topo = subdivide(1, 1);
  Rng rng(2);
  for (int m : {0, 2}) {
    Bary mean = Bary::Zero();
    int n = 0;
    for (int rep = 0; rep < 20000 / (1 << (2 * m)); ++rep)
      for (const auto& c : stratified_candidates(topo, {0, 3}, m, rng)) {
        mean += c.bary_on_coarse;
        ++n;
      }
    mean /= n;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(mean[i], 1.0 / 3.0, 0.005) << "m=" << m;
  }
}

TEST(UniformTriangleBary, CornersAndMean) {
  EXPECT_EQ(uniform_triangle_bary(0, 0.7), Bary(1, 0, 0));
  EXPECT_EQ(uniform_triangle_bary(1, 0), Bary(0, 1, 0));
  EXPECT_EQ(uniform_triangle_bary(1, 1), Bary(0, 0, 1));
  Rng rng(3);
  Bary mean = Bary::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) mean += uniform_triangle_bary(rng.uniform(), rng.uniform()) / n;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(mean[i], 1.0 / 3.0, 0.005);
}

TEST(Jacobian, IdentityIsOne) {
  const IndexedMesh m = shapes::icosphere(2);
  const auto areas = mixed_voronoi_areas(m);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    Bary b(rng.uniform(), rng.uniform(), rng.uniform());
    b /= b.sum();
    const SurfacePoint p{static_cast<int>(rng.uniform_int(0, m.num_faces() - 1)), b};
    EXPECT_NEAR(jacobian_estimate(m, areas, p, m, areas, p), 1.0, 1e-14);
  }
}

TEST(Jacobian, UniformScalingByTwo) {
  const IndexedMesh m = shapes::icosphere(2);
  const IndexedMesh big = shapes::scaled(m, Vec3(2, 2, 2));
  const auto a = mixed_voronoi_areas(m), b = mixed_voronoi_areas(big);
  const SurfacePoint p{7, Bary(0.2, 0.5, 0.3)};
  EXPECT_NEAR(jacobian_estimate(big, b, p, m, a, p), 4.0, 1e-12);
}

TEST(Jacobian, VertexPointIsAreaRatio) {
  const IndexedMesh m = shapes::icosphere(1);
  const IndexedMesh warped = shapes::scaled(m, Vec3(1.5, 1, 0.7));
  const auto a = mixed_voronoi_areas(m), b = mixed_voronoi_areas(warped);
  for (int f = 0; f < m.num_faces(); f += 7) {
    const SurfacePoint p{f, Bary(0, 1, 0)};
    const int v = m.faces[f][1];
    EXPECT_NEAR(jacobian_estimate(warped, b, p, m, a, p), b[v] / a[v], 1e-14);
  }
}

TEST(Jacobian, AnisotropicStretchWithinTenPercent) {
  const IndexedMesh coarse = shapes::box_grid(6);
  const IndexedMesh stretched = shapes::scaled(coarse, Vec3(2, 1, 1));
  const auto a = mixed_voronoi_areas(coarse), b = mixed_voronoi_areas(stretched);
  int tested = 0;
  for (int f = 0; f < coarse.num_faces(); ++f) {
    const Vec3 c = eval_point(coarse, {f, Bary(1.0 / 3, 1.0 / 3, 1.0 / 3)});
    // Faces well inside the z = +-1 sides, where the true area factor is 2.
    if (std::abs(std::abs(c.z()) - 1.0) > 1e-12 || c.x() * c.x() > 0.4 || c.y() * c.y() > 0.4) continue;
    ++tested;
    const SurfacePoint p{f, Bary(1.0 / 3, 1.0 / 3, 1.0 / 3)};
    EXPECT_NEAR(jacobian_estimate(stretched, b, p, coarse, a, p), 2.0, 0.2);
  }
  EXPECT_GT(tested, 0);
}

TEST(SelectTopK, UniformWeightsGiveUniformStrata) {
  Rng rng(5);
  const int trials = 64000;
  std::vector<int> counts(64, 0);
  for (int t = 0; t < trials; ++t) ++counts[select_top_k(with_jacobians(std::vector<double>(64, 1.0)), 1, rng)[0].sub_area];
  const double expected = trials / 64.0, sigma = std::sqrt(expected * (63.0 / 64.0));
  for (int s = 0; s < 64; ++s) EXPECT_NEAR(counts[s], expected, 5 * sigma) << "stratum " << s;
}

TEST(SelectTopK, TwoCandidateExactProbability) {
  // U1*a > U2*b with a >= b happens with probability 1 - b / (2a).
  Rng rng(6);
  const int trials = 40000;
  int wins = 0;
  for (int t = 0; t < trials; ++t) wins += select_top_k(with_jacobians({2.0, 1.0}), 1, rng)[0].sub_area == 0;
  const double p = 0.75, sigma = std::sqrt(p * (1 - p) / trials);
  EXPECT_NEAR(wins / static_cast<double>(trials), p, 4 * sigma);
}

TEST(SelectTopK, DominantJacobianAlwaysSelected) {
  // Miss probability is about (63/64) * 1e-12 per trial.
  Rng rng(7);
  std::vector<double> js(64, 1.0);
  js[17] = 1e12;
  for (int t = 0; t < 2000; ++t) EXPECT_EQ(select_top_k(with_jacobians(js), 1, rng)[0].sub_area, 17);

  js.assign(64, 1.0);
  js[40] = 1000.0;
  int hits = 0;
  for (int t = 0; t < 5000; ++t) hits += select_top_k(with_jacobians(js), 1, rng)[0].sub_area == 40;
  EXPECT_GE(hits / 5000.0, 0.95);
}

TEST(SelectTopK, KBoundaries) {
  Rng rng(8);
  const auto all = select_top_k(with_jacobians(std::vector<double>(64, 1.0)), 64, rng);
  ASSERT_EQ(all.size(), 64u);
  for (int s = 0; s < 64; ++s) EXPECT_EQ(all[s].sub_area, s);
  expect_error(ErrorCode::InsufficientCandidates,
               [&] { select_top_k(with_jacobians(std::vector<double>(64, 1.0)), 65, rng); });
  const auto four = select_top_k(with_jacobians(std::vector<double>(64, 1.0)), 4, rng);
  for (std::size_t i = 1; i < four.size(); ++i) EXPECT_LT(four[i - 1].sub_area, four[i].sub_area);
}

TEST(SampleMesh, CountsForBothProfiles) {
  const SimplificationTrace t = simplify_to(shapes::icosphere(2), 96, 1);
  const SubdividedTopology topo = subdivide(t.coarse, 3);
  for (int k : {1, 16}) {
    SelectionConfig cfg;
    cfg.k = k;
    cfg.seed = 3;
    const SampledFeatures f = sample_mesh_features(t, topo, cfg);
    EXPECT_EQ(f.points.size(), static_cast<std::size_t>(96 * 64 * k));
    EXPECT_EQ(f.unit_count(), 96 * 64);
    for (const PointFeature& p : f.points) {
      EXPECT_NEAR(p.normal.norm(), 1.0, 1e-12);
      EXPECT_GT(p.jacobian, 0.0);
      EXPECT_NEAR(p.position.norm(), 1.0, 0.02);  // on the unit icosphere
    }
  }
}

TEST(SampleMesh, IdentityTraceKeepsUnitAndPosition) {
  const IndexedMesh m = shapes::icosphere(1);
  const SimplificationTrace t = identity_trace(m);
  const SubdividedTopology topo = subdivide(m, 2);
  SelectionConfig cfg;
  cfg.k = 4;
  cfg.seed = 11;
  const SampledFeatures f = sample_mesh_features(t, topo, cfg);
  for (int g = 0; g < topo.unit_count(); ++g) {
    const TopologyUnitId u = topo.unit(g);
    for (const PointFeature& p : f.unit(g)) {
      EXPECT_EQ(p.source.face, u.coarse_face);
      EXPECT_EQ(coarse_bary_to_unit(2, p.source.bary).local, u.local);
      EXPECT_EQ(p.position, eval_point(m, p.source));
      EXPECT_NEAR(p.jacobian, 1.0, 1e-14);
    }
  }
}

TEST(SampleMesh, UniformScalingGivesJacobianFour) {
  const IndexedMesh m = shapes::icosphere(1);
  const SimplificationTrace t = paired_trace(shapes::scaled(m, Vec3(2, 2, 2)), m);
  const SubdividedTopology topo = subdivide(m, 1);
  SelectionConfig cfg;
  cfg.seed = 2;
  for (const PointFeature& p : sample_mesh_features(t, topo, cfg).points) EXPECT_NEAR(p.jacobian, 4.0, 1e-12);
}

TEST(SampleMesh, DeterministicPerSeed) {
  const SimplificationTrace t = simplify_to(shapes::torus(1.0, 0.35, 20, 12), 128, 2);
  const SubdividedTopology topo = subdivide(t.coarse, 2);
  SelectionConfig cfg;
  cfg.k = 2;
  cfg.seed = 99;
  const SampledFeatures a = sample_mesh_features(t, topo, cfg), b = sample_mesh_features(t, topo, cfg);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].position, b.points[i].position);
  cfg.seed = 100;
  const SampledFeatures c = sample_mesh_features(t, topo, cfg);
  int differ = 0;
  for (std::size_t i = 0; i < a.points.size(); ++i) differ += a.points[i].position != c.points[i].position;
  EXPECT_GT(differ, static_cast<int>(a.points.size()) / 2);
}

TEST(SampleMesh, RejectsBadK) {
  const SimplificationTrace t = identity_trace(shapes::icosahedron());
  const SubdividedTopology topo = subdivide(t.coarse, 1);
  SelectionConfig cfg;
  cfg.strata_levels = 1;
  cfg.k = 5;
  expect_error(ErrorCode::InsufficientCandidates, [&] { sample_mesh_features(t, topo, cfg); });
  expect_error(ErrorCode::ShapeMismatch, [&] { sample_mesh_features(t, subdivide(19, 1), SelectionConfig{}); });
}
