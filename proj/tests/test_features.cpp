#include "meshpatch/features.hpp"
#include "meshpatch/shapes.hpp"
#include "meshpatch/simplify.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace meshpatch;
using meshpatch::testing::expect_error;

namespace {

// One unit with k points on the given M^L faces.
SampledFeatures single_unit(const std::vector<int>& faces) {
  SampledFeatures f;
  f.k = static_cast<int>(faces.size());
  f.units_per_face = 1;
  for (int face : faces) {
    PointFeature p;
    p.source.face = face;
    f.points.push_back(p);
  }
  return f;
}

SampledFeatures constant_features(int faces, int level, int k, const Vec3& pos) {
  SampledFeatures f;
  f.k = k;
  f.level = level;
  f.units_per_face = 1 << (2 * level);
  f.points.resize(static_cast<std::size_t>(faces) * f.units_per_face * k);
  for (PointFeature& p : f.points) {
    p.position = pos;
    p.normal = Vec3(0, 0, 1);
  }
  return f;
}

}  // namespace

TEST(Pack, ShapesAndMask) {
  const SubdividedTopology topo = subdivide(96, 3);
  const PatchLayout layout = build_patch_layout(topo, 256);
  const PatchTensor t = pack_patches(constant_features(96, 3, 16, Vec3(0.5, 0.5, 0.5)), layout);
  EXPECT_EQ(t.patches, 256);
  EXPECT_EQ(t.row_length(), 6144);
  EXPECT_EQ(t.data.size(), 256u * 6144u);
  EXPECT_EQ(std::count(t.mask.begin(), t.mask.end(), 1), 96);
  for (int p = 0; p < 96; ++p)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(t.avg_position[3 * p + c], 0.5f);
  for (int p = 96; p < 256; ++p) {
    EXPECT_EQ(t.mask[p], 0);
    for (float x : t.row(p)) ASSERT_EQ(x, 0.0f);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(t.avg_position[3 * p + c], 0.0f);
  }
}

TEST(Pack, ClassificationRowLength) {
  const SubdividedTopology topo = subdivide(128, 3);
  const PatchTensor t = pack_patches(constant_features(128, 3, 1, Vec3::Zero()), build_patch_layout(topo, 256));
  EXPECT_EQ(t.row_length(), 384);
}

TEST(Pack, UnpackIsBijective) {
  const int faces = 12, level = 2, k = 3;
  SampledFeatures f = constant_features(faces, level, k, Vec3::Zero());
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    f.points[i].position = Vec3(static_cast<double>(i), -static_cast<double>(i), 0.5 * i);
    f.points[i].normal = Vec3(1, 0, 0);
  }
  const SubdividedTopology topo = subdivide(faces, level);
  const PatchLayout layout = build_patch_layout(topo, 20);
  const PatchTensor t = pack_patches(f, layout);
  for (int p = 0; p < faces; ++p)
    for (int slot = 0; slot < layout.units_per_patch; ++slot)
      for (int i = 0; i < k; ++i) {
        const int global = layout.patch_to_face[p] * layout.units_per_patch + layout.unit_order[slot];
        const PointFeature& src = f.unit(global)[i];
        const auto ch = t.point(p, slot, i);
        for (int c = 0; c < 3; ++c) {
          EXPECT_EQ(ch[c], static_cast<float>(src.position[c]));
          EXPECT_EQ(ch[3 + c], static_cast<float>(src.normal[c]));
        }
      }
}

TEST(Pack, RejectsMismatchedLayout) {
  const PatchLayout layout = build_patch_layout(subdivide(10, 2), 0);
  expect_error(ErrorCode::ShapeMismatch, [&] { pack_patches(constant_features(10, 1, 1, Vec3::Zero()), layout); });
}

TEST(Labels, MajorityVote) {
  std::vector<int> labels(20);
  for (int f = 0; f < 20; ++f) labels[f] = f < 10 ? 2 : 5;
  EXPECT_EQ(labels_to_units(labels, single_unit({3, 3, 3}))[0], 2);

  std::vector<int> nine_seven;
  for (int i = 0; i < 9; ++i) nine_seven.push_back(i);       // label 2
  for (int i = 0; i < 7; ++i) nine_seven.push_back(10 + i);  // label 5
  EXPECT_EQ(labels_to_units(labels, single_unit(nine_seven))[0], 2);

  std::vector<int> tie_labels = {4, 1};
  std::vector<int> tie;
  for (int i = 0; i < 8; ++i) tie.push_back(0);
  for (int i = 0; i < 8; ++i) tie.push_back(1);
  EXPECT_EQ(labels_to_units(tie_labels, single_unit(tie))[0], 1);
}

TEST(Labels, PermutationInvariant) {
  Rng rng(3);
  std::vector<int> labels(30);
  for (int& l : labels) l = static_cast<int>(rng.uniform_int(0, 4));
  std::vector<int> faces(16);
  for (int& f : faces) f = static_cast<int>(rng.uniform_int(0, 29));
  const int expected = labels_to_units(labels, single_unit(faces))[0];
  for (int t = 0; t < 50; ++t) {
    std::shuffle(faces.begin(), faces.end(), rng.engine());
    EXPECT_EQ(labels_to_units(labels, single_unit(faces))[0], expected);
  }
}

TEST(Labels, MissingLabel) {
  const std::vector<int> labels = {1, 2};
  expect_error(ErrorCode::MissingLabel, [&] { labels_to_units(labels, single_unit({0, 2})); });
}

TEST(Labels, UnitsToFacesIdentityAndConstant) {
  const IndexedMesh m = shapes::icosphere(1);
  const SimplificationTrace t = identity_trace(m);
  const SubdividedTopology topo0 = subdivide(m, 0);
  std::vector<int> units(topo0.unit_count());
  for (int u = 0; u < topo0.unit_count(); ++u) units[u] = 1000 + u;
  const auto faces = units_to_faces(units, t, topo0);
  for (int f = 0; f < m.num_faces(); ++f) EXPECT_EQ(faces[f], 1000 + f);

  const SimplificationTrace s = simplify_to(shapes::icosphere(2), 96, 1);
  const SubdividedTopology topo = subdivide(s.coarse, 2);
  const std::vector<int> constant(topo.unit_count(), 7);
  for (int l : units_to_faces(constant, s, topo)) EXPECT_EQ(l, 7);
  expect_error(ErrorCode::ShapeMismatch, [&] { units_to_faces(std::vector<int>(3, 0), s, topo); });
}

TEST(Augment, DisabledIsIdentity) {
  const IndexedMesh m = shapes::torus(1.0, 0.3, 8, 6);
  Rng rng(1);
  const AugmentResult r = augment(m, AugmentConfig{}, rng);
  EXPECT_EQ(r.mesh.vertices, m.vertices);
  EXPECT_EQ(r.mesh.faces, m.faces);
}

TEST(Augment, ScaleIsClampedExactly) {
  AugmentConfig cfg;
  cfg.anisotropic_scale = true;
  cfg.scale_sigma = 1.0;
  cfg.truncation = 0.3;
  const double lo = 1.0 - cfg.truncation * cfg.scale_sigma, hi = 1.0 + cfg.truncation * cfg.scale_sigma;
  Rng rng(2);
  int clamped = 0;
  for (int t = 0; t < 500; ++t) {
    const AugmentResult r = augment(shapes::tetrahedron(), cfg, rng);
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(r.scale[i], lo);
      EXPECT_LE(r.scale[i], hi);
      clamped += r.scale[i] == lo || r.scale[i] == hi;
    }
  }
  EXPECT_GT(clamped, 500);  // |N(0,1)| > 0.3 about 76% of the time
}

TEST(Augment, DefaultScaleRangeAndMean) {
  AugmentConfig cfg;
  cfg.anisotropic_scale = true;
  Rng rng(3);
  const IndexedMesh m = shapes::tetrahedron();
  Vec3 mean = Vec3::Zero();
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const Vec3 s = augment(m, cfg, rng).scale;
    ASSERT_GE(s.minCoeff(), 0.7 - 1e-12);
    ASSERT_LE(s.maxCoeff(), 1.3 + 1e-12);
    mean += s / n;
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(mean[i], 1.0, 0.01);
}

TEST(Augment, QuarterTurns) {
  const Eigen::Matrix3d rz = axis_rotation({0, 0, 1});
  EXPECT_EQ(rz * Vec3(1, 0, 0), Vec3(0, 1, 0));
  EXPECT_EQ(rz * Vec3(0, 1, 0), Vec3(-1, 0, 0));
  EXPECT_EQ(axis_rotation({4, -4, 8}), Eigen::Matrix3d::Identity());
  EXPECT_EQ(axis_rotation({2, 0, 0}) * Vec3(0, 1, 1), Vec3(0, -1, -1));

  const Eigen::Matrix3d ref = Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()).toRotationMatrix();
  EXPECT_LT((rz - ref).norm(), 1e-15);

  AugmentConfig cfg;
  cfg.axis_rotation = true;
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const AugmentResult r = augment(shapes::cube(), cfg, rng);
    EXPECT_NEAR(std::abs(r.rotation.determinant()), 1.0, 0.0);
    EXPECT_EQ(r.rotation * r.rotation.transpose(), Eigen::Matrix3d::Identity());
  }
}

TEST(Augment, PreservesTopologyAndAreaBounds) {
  AugmentConfig cfg;
  cfg.anisotropic_scale = cfg.axis_rotation = true;
  Rng rng(5);
  const IndexedMesh m = shapes::icosphere(2);
  for (int t = 0; t < 20; ++t) {
    const AugmentResult r = augment(m, cfg, rng);
    EXPECT_EQ(r.mesh.faces, m.faces);
    const MeshDiagnostics d = validate(r.mesh);
    EXPECT_TRUE(d.is_manifold && d.is_watertight);
    for (int f = 0; f < m.num_faces(); ++f) {
      // Orientation kept: the scaled, rotated normal points away from the origin.
      const Vec3 c = eval_point(r.mesh, {f, Bary::Constant(1.0 / 3.0)});
      EXPECT_GT(face_normal(r.mesh, f).dot(c), 0.0);
    }
  }
}
