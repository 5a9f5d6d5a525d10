#include "meshpatch/rng.hpp"
#include "meshpatch/shapes.hpp"
#include "meshpatch/simplify.hpp"
#include "meshpatch/topology.hpp"
#include "test_util.hpp"

#include <set>

using namespace meshpatch;
using meshpatch::testing::expect_error;

namespace {

Bary random_bary(Rng& rng) {
  Bary b(rng.uniform(), rng.uniform(), rng.uniform());
  return b / b.sum();
}

double lattice_area(const std::array<LatticeCorner, 3>& t) {
  // Signed area in the (c1, c2) plane, in units of the smallest lattice triangle.
  const int ax = t[1][1] - t[0][1], ay = t[1][2] - t[0][2];
  const int bx = t[2][1] - t[0][1], by = t[2][2] - t[0][2];
  return ax * by - ay * bx;
}

}  // namespace

TEST(Topology, UnitCounts) {
  for (int s = 0; s <= 4; ++s) {
    const SubdividedTopology t = subdivide(96, s);
    EXPECT_EQ(t.units_per_face(), 1 << (2 * s));
    EXPECT_EQ(t.unit_count(), 96 << (2 * s));
  }
  EXPECT_EQ(subdivide(256, 3).unit_count(), 16384);
}

TEST(Topology, LevelZeroIsCoarseFace) {
  const SubdividedTopology t = subdivide(10, 0);
  const auto c = t.corners(0);
  EXPECT_EQ(c[0], (LatticeCorner{1, 0, 0}));
  EXPECT_EQ(c[1], (LatticeCorner{0, 1, 0}));
  EXPECT_EQ(c[2], (LatticeCorner{0, 0, 1}));
  const Bary b(0.2, 0.3, 0.5);
  EXPECT_EQ(unit_to_coarse_bary(t, {4, 0}, b), b);
}

TEST(Topology, LevelOneQuadrants) {
  const SubdividedTopology t = subdivide(1, 1);
  EXPECT_EQ(t.corners(0)[0], (LatticeCorner{2, 0, 0}));
  EXPECT_EQ(t.corners(1)[1], (LatticeCorner{0, 2, 0}));
  EXPECT_EQ(t.corners(2)[2], (LatticeCorner{0, 0, 2}));
  const auto center = t.corner_barys(3);
  EXPECT_EQ(center[0], Bary(0, 0.5, 0.5));
  EXPECT_EQ(center[1], Bary(0.5, 0, 0.5));
  EXPECT_EQ(center[2], Bary(0.5, 0.5, 0));
  for (int u = 0; u < 4; ++u)
    for (const Bary& b : t.corner_barys(u)) EXPECT_DOUBLE_EQ(b.sum(), 1.0);
}

TEST(Topology, UnitsTileTheReferenceTriangle) {
  for (int s = 0; s <= 4; ++s) {
    const SubdividedTopology t = subdivide(1, s);
    std::set<std::array<LatticeCorner, 3>> seen;
    for (int u = 0; u < t.units_per_face(); ++u) {
      const auto c = t.corners(u);
      // Same orientation and unit lattice area for every unit.
      EXPECT_EQ(lattice_area(c), 1) << "s=" << s << " u=" << u;
      for (const LatticeCorner& p : c) EXPECT_EQ(p[0] + p[1] + p[2], 1 << s);
      auto sorted = c;
      std::sort(sorted.begin(), sorted.end());
      EXPECT_TRUE(seen.insert(sorted).second);
    }
  }
}

TEST(Topology, UnitToCoarseExamples) {
  const SubdividedTopology t = subdivide(2, 1);
  const Bary centroid(1.0 / 3, 1.0 / 3, 1.0 / 3);
  const Bary a = unit_to_coarse_bary(t, {1, 0}, centroid);
  EXPECT_NEAR(a[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(a[1], 1.0 / 6, 1e-15);
  EXPECT_NEAR(a[2], 1.0 / 6, 1e-15);
  const Bary c = unit_to_coarse_bary(t, {0, 3}, centroid);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(c[i], 1.0 / 3, 1e-15);
  EXPECT_EQ(unit_to_coarse_bary(t, {0, 2}, Bary(0, 0, 1)), Bary(0, 0, 1));
}

TEST(Topology, CoarseToUnitInvertsUnitToCoarse) {
  Rng rng(4);
  for (int s = 0; s <= 4; ++s) {
    const SubdividedTopology t = subdivide(1, s);
    for (int i = 0; i < 400; ++i) {
      const int local = static_cast<int>(rng.uniform_int(0, t.units_per_face() - 1));
      const Bary b = random_bary(rng);
      const UnitLocation loc = coarse_bary_to_unit(s, unit_to_coarse_bary(t, {0, local}, b));
      EXPECT_EQ(loc.local, local);
      EXPECT_LT((loc.bary - b).norm(), 1e-12);
    }
  }
}

TEST(Topology, BoundaryPointGoesToFirstQuadrant) {
  // Midpoint of edge ab lies on quadrants A, B and Center.
  EXPECT_EQ(coarse_bary_to_unit(1, Bary(0.5, 0.5, 0)).local, 0);
  EXPECT_EQ(coarse_bary_to_unit(1, Bary(0, 0.5, 0.5)).local, 1);
}

TEST(PatchLayout, FullBudget) {
  const PatchLayout l = build_patch_layout(subdivide(256, 3), 256);
  EXPECT_EQ(l.patch_count, 256);
  EXPECT_EQ(l.real_patches, 256);
  EXPECT_EQ(l.padding, 0);
  EXPECT_EQ(l.units_per_patch, 64);
}

TEST(PatchLayout, ZeroFill) {
  const PatchLayout l = build_patch_layout(subdivide(96, 3), 256);
  EXPECT_EQ(l.real_patches, 96);
  EXPECT_EQ(l.padding, 160);
  ASSERT_EQ(l.patch_to_face.size(), 96u);
  for (int p = 0; p < 96; ++p) EXPECT_EQ(l.patch_to_face[p], p);
  for (int u = 0; u < 64; ++u) EXPECT_EQ(l.unit_order[u], u);
}

TEST(PatchLayout, BudgetExceeded) {
  expect_error(ErrorCode::PatchBudgetExceeded, [] { build_patch_layout(subdivide(300, 3), 256); });
  EXPECT_EQ(build_patch_layout(subdivide(300, 3), 0).patch_count, 300);
}

TEST(Topology, AdjacencySymmetricOnClosedMesh) {
  const SimplificationTrace tr = simplify_to(shapes::icosphere(2), 96, 3);
  for (int s = 0; s <= 3; ++s) {
    const SubdividedTopology t = subdivide(tr.coarse, s);
    ASSERT_TRUE(t.has_adjacency());
    for (int g = 0; g < t.unit_count(); ++g) {
      for (int e = 0; e < 3; ++e) {
        const int n = t.neighbor(g, e);
        ASSERT_GE(n, 0);
        ASSERT_NE(n, g);
        int back = 0;
        for (int f = 0; f < 3; ++f) back += t.neighbor(n, f) == g;
        EXPECT_EQ(back, 1);
      }
    }
  }
  EXPECT_EQ(subdivide(96, 2).neighbor(0, 0), -1);
}

TEST(Topology, SubdividedMeshIsWatertight) {
  const IndexedMesh coarse = shapes::icosahedron();
  for (int s = 0; s <= 3; ++s) {
    const SubdividedMesh sub = build_subdivided_mesh(coarse, s);
    const int n = 1 << s;
    const int edges = coarse.num_faces() * 3 / 2;
    const int expected_vertices = coarse.num_vertices() + edges * (n - 1) + coarse.num_faces() * (n - 1) * (n - 2) / 2;
    EXPECT_EQ(sub.mesh.num_vertices(), expected_vertices);
    EXPECT_EQ(sub.mesh.num_faces(), coarse.num_faces() * n * n);
    const MeshDiagnostics d = validate(sub.mesh);
    EXPECT_TRUE(d.is_manifold && d.is_watertight) << "s=" << s;
    EXPECT_EQ(d.euler_characteristic, 2);
    EXPECT_NEAR(surface_area(sub.mesh), surface_area(coarse), 1e-12);
  }
}
