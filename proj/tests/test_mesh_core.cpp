#include "meshpatch/mesh.hpp"
#include "meshpatch/rng.hpp"
#include "meshpatch/shapes.hpp"
#include "meshpatch/verify.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace meshpatch;
using meshpatch::testing::expect_error;

namespace {

IndexedMesh parse(const std::string& text, MeshFormat fmt) {
  std::istringstream in(text);
  return load_mesh(in, fmt);
}

double signed_volume(const IndexedMesh& m) {
  double v = 0.0;
  for (const Face& f : m.faces) v += m.vertices[f[0]].dot(m.vertices[f[1]].cross(m.vertices[f[2]])) / 6.0;
  return v;
}

}  // namespace

TEST(LoadMesh, MinimalOff) {
  const IndexedMesh m = parse("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n", MeshFormat::OFF);
  EXPECT_EQ(m.num_vertices(), 3);
  EXPECT_EQ(m.num_faces(), 1);
  EXPECT_EQ(m.faces[0], (Face{0, 1, 2}));
}

TEST(LoadMesh, OffCountsOnHeaderLine) {
  const IndexedMesh m = parse("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n", MeshFormat::OFF);
  EXPECT_EQ(m.num_faces(), 1);
}

TEST(LoadMesh, ObjQuadRejected) {
  expect_error(ErrorCode::NonTriangleFace,
               [] { parse("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n", MeshFormat::OBJ); });
}

TEST(LoadMesh, OffQuadRejected) {
  expect_error(ErrorCode::NonTriangleFace, [] {
    parse("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n", MeshFormat::OFF);
  });
}

TEST(LoadMesh, MalformedLineReportsLineNumber) {
  try {
    parse("v 0 0 0\nv 1 0 0\nv 1 x 0\nf 1 2 3\n", MeshFormat::OBJ);
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
}

TEST(LoadMesh, ObjTokensAndNegativeIndices) {
  const IndexedMesh m =
      parse("# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nusemtl x\nf 1/1/1 2//1 -1\n", MeshFormat::OBJ);
  ASSERT_EQ(m.num_faces(), 1);
  EXPECT_EQ(m.faces[0], (Face{0, 1, 2}));
}

TEST(LoadMesh, OutOfRangeIndex) {
  expect_error(ErrorCode::ParseError, [] { parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n", MeshFormat::OBJ); });
}

TEST(LoadMesh, ObjWriterRoundTrip) {
  const IndexedMesh m = shapes::icosphere(1);
  std::stringstream s;
  s.precision(17);
  write_obj(s, m);
  const IndexedMesh back = load_mesh(s, MeshFormat::OBJ);
  ASSERT_EQ(back.num_faces(), m.num_faces());
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_LT((back.vertices[v] - m.vertices[v]).norm(), 1e-12);
  EXPECT_EQ(back.faces, m.faces);
}

TEST(LoadMesh, FormatFromPath) {
  EXPECT_EQ(format_from_path("a/b.OBJ"), MeshFormat::OBJ);
  EXPECT_EQ(format_from_path("x.off"), MeshFormat::OFF);
  expect_error(ErrorCode::ParseError, [] { format_from_path("x.ply"); });
}

TEST(Validate, TetrahedronOff) {
  const IndexedMesh m = parse(
      "OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n", MeshFormat::OFF);
  const MeshDiagnostics d = validate(m);
  EXPECT_TRUE(d.is_manifold);
  EXPECT_TRUE(d.is_watertight);
  EXPECT_EQ(d.genus, 0);
  EXPECT_EQ(d.euler_characteristic, 2);
}

TEST(Validate, BowtieIsNotManifold) {
  const MeshDiagnostics d = validate(meshpatch::testing::bowtie());
  EXPECT_FALSE(d.is_manifold);
  EXPECT_FALSE(d.is_watertight);
  bool vertex_defect = false;
  for (const Defect& x : d.defects) vertex_defect |= x.kind == Defect::Kind::NonManifoldVertex && x.a == 0;
  EXPECT_TRUE(vertex_defect);
}

TEST(Validate, CubeGenusZeroAndOutward) {
  const IndexedMesh m = shapes::cube();
  const MeshDiagnostics d = validate(m);
  EXPECT_TRUE(d.is_watertight);
  EXPECT_TRUE(d.is_manifold);
  EXPECT_EQ(d.euler_characteristic, 2);  // 8 - 18 + 12
  EXPECT_EQ(d.genus, 0);
  EXPECT_GT(signed_volume(m), 0.0);
}

TEST(Validate, TorusGenusOne) {
  const MeshDiagnostics d = validate(shapes::torus(1.0, 0.3, 12, 8));
  EXPECT_TRUE(d.is_watertight && d.is_manifold);
  EXPECT_EQ(d.genus, 1);
  EXPECT_EQ(d.euler_characteristic, 0);
}

TEST(Validate, FlippedFaceIsInconsistent) {
  IndexedMesh m = shapes::tetrahedron();
  std::swap(m.faces[0][1], m.faces[0][2]);
  const MeshDiagnostics d = validate(m);
  EXPECT_FALSE(d.is_manifold && d.is_watertight);
}

TEST(Validate, BuiltinSuiteIsClosedManifold) {
  for (const auto& nm : shapes::builtin_suite()) {
    const MeshDiagnostics d = validate(nm.mesh);
    EXPECT_TRUE(d.is_manifold && d.is_watertight) << nm.name;
    EXPECT_GE(nm.mesh.num_faces(), 300) << nm.name;
    EXPECT_LE(nm.mesh.num_faces(), 3000) << nm.name;
    EXPECT_GT(signed_volume(nm.mesh), 0.0) << nm.name;
  }
}

TEST(Repair, WeldsDuplicatesAndDropsDuplicateFaces) {
  IndexedMesh m = shapes::tetrahedron();
  m.vertices.push_back(m.vertices[0] + Vec3(1e-12, 0, 0));
  m.faces[0][0] = 4;
  m.faces.push_back(m.faces[1]);
  const IndexedMesh r = repair_mesh(m);
  const MeshDiagnostics d = validate(r);
  EXPECT_EQ(r.num_faces(), 4);
  EXPECT_TRUE(d.is_manifold && d.is_watertight);
}

TEST(CheckFaces, DegenerateAndInvalid) {
  IndexedMesh m = shapes::tetrahedron();
  m.vertices.push_back(Vec3(0, 0, 0));
  m.vertices.push_back(Vec3(0, 0, 0));
  m.faces.push_back({4, 5, 0});
  expect_error(ErrorCode::DegenerateFace, [&] { check_faces(m); });
  m.faces.back() = {0, 0, 1};
  expect_error(ErrorCode::InvalidFace, [&] { check_faces(m); });
}

TEST(Normalize, CubeToUnitBox) {
  const NormalizedMesh n = normalize_unit_box(shapes::cube(2.0));
  for (const Vec3& v : n.mesh.vertices)
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(v[i] == 0.0 || v[i] == 1.0);
  EXPECT_DOUBLE_EQ(n.transform.scale, 0.25);
  const Vec3 p(0.3, -1.2, 2.0);
  EXPECT_LT((n.transform.invert(n.transform.apply(p)) - p).norm(), 1e-15);
}

TEST(Normalize, IdempotentOnUnitMesh) {
  const NormalizedMesh a = normalize_unit_box(shapes::icosphere(1));
  const NormalizedMesh b = normalize_unit_box(a.mesh);
  EXPECT_NEAR(b.transform.scale, 1.0, 1e-12);
  EXPECT_LT(b.transform.offset.norm(), 1e-12);
  for (int v = 0; v < a.mesh.num_vertices(); ++v) EXPECT_LT((a.mesh.vertices[v] - b.mesh.vertices[v]).norm(), 1e-12);
}

TEST(Normalize, AspectPreserved) {
  const NormalizedMesh n = normalize_unit_box(shapes::scaled(shapes::cube(1.0), Vec3(2.0, 1.0, 0.5)));
  Vec3 lo = n.mesh.vertices[0], hi = lo;
  for (const Vec3& v : n.mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  EXPECT_NEAR(hi.x() - lo.x(), 1.0, 1e-15);
  EXPECT_NEAR(hi.y() - lo.y(), 0.5, 1e-15);
  EXPECT_NEAR(hi.z() - lo.z(), 0.25, 1e-15);
  EXPECT_NEAR(lo.norm(), 0.0, 1e-15);
}

TEST(Normalize, DegenerateExtent) {
  IndexedMesh m;
  m.vertices = {Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)};
  m.faces = {{0, 1, 2}};
  expect_error(ErrorCode::DegenerateExtent, [&] { normalize_unit_box(m); });
}

TEST(EvalPoint, Examples) {
  IndexedMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 3, 0)};
  m.faces = {{0, 1, 2}};
  EXPECT_EQ(eval_point(m, {0, Bary(1, 0, 0)}), Vec3(0, 0, 0));
  EXPECT_LT((eval_point(m, {0}) - Vec3(1, 1, 0)).norm(), 1e-15);
  EXPECT_LT((eval_point(m, {0, Bary(0, 0.5, 0.5)}) - Vec3(1.5, 1.5, 0)).norm(), 1e-15);
  expect_error(ErrorCode::InvalidFace, [&] { eval_point(m, {1}); });
}

TEST(EvalPoint, AffineInBarycentrics) {
  const IndexedMesh m = shapes::icosphere(1);
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const int f = static_cast<int>(rng.uniform_int(0, m.num_faces() - 1));
    Bary a(rng.uniform(), rng.uniform(), rng.uniform()), b(rng.uniform(), rng.uniform(), rng.uniform());
    a /= a.sum();
    b /= b.sum();
    const double l = rng.uniform();
    const Vec3 lhs = eval_point(m, {f, l * a + (1 - l) * b});
    const Vec3 rhs = l * eval_point(m, {f, a}) + (1 - l) * eval_point(m, {f, b});
    EXPECT_LT((lhs - rhs).norm(), 1e-14);
  }
}

TEST(PointNormal, WindingAndDegenerate) {
  IndexedMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(2, 0, 0)};
  m.faces = {{0, 1, 2}, {0, 2, 1}, {0, 1, 3}};
  EXPECT_LT((point_normal(m, {0, Bary(0.2, 0.3, 0.5)}) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((point_normal(m, {1}) - Vec3(0, 0, -1)).norm(), 1e-15);
  expect_error(ErrorCode::DegenerateFace, [&] { point_normal(m, {2}); });
}

TEST(PointNormal, IcosahedronNearRadial) {
  const IndexedMesh m = shapes::icosahedron();
  const double limit = std::cos(20.0 * std::numbers::pi / 180.0);
  for (int f = 0; f < m.num_faces(); ++f) {
    const Vec3 radial = eval_point(m, {f}).normalized();
    EXPECT_GT(point_normal(m, {f, Bary(0.6, 0.3, 0.1)}).dot(radial), limit);
  }
}

TEST(PointNormal, InterpolatedVertexModeIsUnit) {
  const IndexedMesh m = shapes::icosphere(2);
  const auto vn = area_weighted_vertex_normals(m);
  for (int f = 0; f < m.num_faces(); f += 7) {
    const Vec3 n = point_normal(m, {f, Bary(0.2, 0.5, 0.3)}, NormalMode::InterpolatedVertex, vn);
    EXPECT_NEAR(n.norm(), 1.0, 1e-12);
    EXPECT_GT(n.dot(eval_point(m, {f}).normalized()), 0.99);
  }
}

TEST(MixedVoronoi, EquilateralTriangle) {
  IndexedMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, std::sqrt(3.0) / 2, 0)};
  m.faces = {{0, 1, 2}};
  const double a = surface_area(m);
  for (double v : mixed_voronoi_areas(m)) EXPECT_NEAR(v, a / 3, 1e-15);
}

TEST(MixedVoronoi, RegularTetrahedron) {
  const IndexedMesh m = shapes::tetrahedron();
  const double a = surface_area(m);
  for (double v : mixed_voronoi_areas(m)) EXPECT_NEAR(v, a / 4, 1e-14);
}

TEST(MixedVoronoi, ObtuseTriangleMatchesScalarOracle) {
  IndexedMesh m;
  m.vertices = {Vec3(0, 0, 0.5), Vec3(4, 0, 0.5), Vec3(2, 0.1, 0.5)};
  m.faces = {{0, 1, 2}};
  const auto areas = mixed_voronoi_areas(m);
  const auto oracle = verify::triangle_mixed_areas(m.vertices[0], m.vertices[1], m.vertices[2]);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(areas[i], oracle[i], 1e-15);
  EXPECT_NEAR(areas[0] + areas[1] + areas[2], 0.2, 1e-15);
  EXPECT_NEAR(areas[2], 0.1, 1e-15);  // obtuse corner takes half
}

TEST(MixedVoronoi, MatchesOracleOnEveryMesh) {
  auto meshes = shapes::builtin_suite();
  meshes.push_back({"box", shapes::box_grid(3)});
  for (const auto& nm : meshes) {
    std::vector<double> oracle(nm.mesh.num_vertices(), 0.0);
    for (const Face& f : nm.mesh.faces) {
      const auto a = verify::triangle_mixed_areas(nm.mesh.vertices[f[0]], nm.mesh.vertices[f[1]], nm.mesh.vertices[f[2]]);
      for (int i = 0; i < 3; ++i) oracle[f[i]] += a[i];
    }
    const auto areas = mixed_voronoi_areas(nm.mesh);
    double sum = 0.0;
    for (int v = 0; v < nm.mesh.num_vertices(); ++v) {
      EXPECT_NEAR(areas[v], oracle[v], 1e-12 * (1.0 + oracle[v])) << nm.name << " vertex " << v;
      EXPECT_GT(areas[v], 0.0);
      sum += areas[v];
    }
    const double total = surface_area(nm.mesh);
    EXPECT_LE(std::abs(sum - total), 1e-6 * total) << nm.name;
  }
}

TEST(MixedVoronoi, PartitionOnHighlyObtuseMesh) {
  const IndexedMesh m = shapes::scaled(shapes::icosphere(2), Vec3(6.0, 1.0, 0.3));
  ASSERT_GT(shapes::obtuse_fraction(m), 0.3);
  double sum = 0.0;
  for (double a : mixed_voronoi_areas(m)) sum += a;
  EXPECT_LE(std::abs(sum - surface_area(m)), 1e-6 * surface_area(m));
}
