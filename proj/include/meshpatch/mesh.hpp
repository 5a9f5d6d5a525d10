#pragma once

#include "meshpatch/common.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace meshpatch {

/// Triangle soup with shared vertices. Faces are counter-clockwise seen from outside.
struct IndexedMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
};

/// A point on a specific mesh: containing face and barycentric triple.
struct SurfacePoint {
  int face = -1;
  Bary bary = Bary(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
};

enum class MeshFormat { OBJ, OFF };

enum class NormalMode {
  Face,                // piecewise constant, normal of the containing face
  InterpolatedVertex,  // barycentric blend of area-weighted vertex normals
};

struct Defect {
  enum class Kind {
    BoundaryEdge,
    NonManifoldEdge,
    InconsistentOrientation,
    NonManifoldVertex,
    DuplicateFace,
    IsolatedVertex,
  };
  Kind kind;
  int a = -1;  // vertex (or face for DuplicateFace)
  int b = -1;  // second edge vertex, or duplicated face
};

std::string_view to_string(Defect::Kind kind);

struct MeshDiagnostics {
  bool is_manifold = false;
  bool is_watertight = false;
  int euler_characteristic = 0;
  int components = 0;
  int genus = 0;
  std::vector<Defect> defects;
};

/// Uniform scale plus translation: p' = scale * p + offset.
struct BoxTransform {
  double scale = 1.0;
  Vec3 offset = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * p + offset; }
  Vec3 invert(const Vec3& p) const { return (p - offset) / scale; }
};

struct NormalizedMesh {
  IndexedMesh mesh;
  BoxTransform transform;
};

// IO

IndexedMesh load_mesh(std::istream& in, MeshFormat format);
IndexedMesh load_mesh_file(const std::string& path);
void write_obj(std::ostream& out, const IndexedMesh& mesh);
MeshFormat format_from_path(const std::string& path);

// Validation and repair

MeshDiagnostics validate(const IndexedMesh& mesh);

/// Welds vertices closer than 1e-9 x bbox diagonal and drops duplicate or
/// collapsed faces. Anything else is left for validate() to reject.
IndexedMesh repair_mesh(const IndexedMesh& mesh);

/// Scale-invariant zero-area threshold: 1e-12 x diagonal^2.
double degenerate_area_threshold(const IndexedMesh& mesh);

/// Throws InvalidFace on out-of-range or repeated indices and DegenerateFace
/// on faces below degenerate_area_threshold().
void check_faces(const IndexedMesh& mesh);

// Geometry

NormalizedMesh normalize_unit_box(const IndexedMesh& mesh);

double bbox_diagonal(const IndexedMesh& mesh);
double face_area(const IndexedMesh& mesh, int face);
Vec3 face_normal(const IndexedMesh& mesh, int face);
double surface_area(const IndexedMesh& mesh);
std::vector<double> face_areas(const IndexedMesh& mesh);

Vec3 eval_point(const IndexedMesh& mesh, const SurfacePoint& p);

Vec3 point_normal(const IndexedMesh& mesh, const SurfacePoint& p);

/// Normal with an explicit mode. `vertex_normals` is only read for
/// InterpolatedVertex and must then come from area_weighted_vertex_normals().
Vec3 point_normal(const IndexedMesh& mesh, const SurfacePoint& p, NormalMode mode,
                  std::span<const Vec3> vertex_normals);

std::vector<Vec3> area_weighted_vertex_normals(const IndexedMesh& mesh);

/// Per-vertex mixed Voronoi areas (circumcentric cells for non-obtuse
/// triangles, half/quarter split for obtuse ones). Sums to the surface area.
/// The per-face pass runs in parallel.
std::vector<double> mixed_voronoi_areas(const IndexedMesh& mesh);

namespace serial {
/// Single-threaded reference for mixed_voronoi_areas().
std::vector<double> mixed_voronoi_areas(const IndexedMesh& mesh);
}  // namespace serial

}  // namespace meshpatch
