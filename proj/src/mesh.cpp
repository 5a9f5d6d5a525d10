#include "meshpatch/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace meshpatch {

std::string_view to_string(Defect::Kind kind) {
  switch (kind) {
    case Defect::Kind::BoundaryEdge: return "boundary_edge";
    case Defect::Kind::NonManifoldEdge: return "non_manifold_edge";
    case Defect::Kind::InconsistentOrientation: return "inconsistent_orientation";
    case Defect::Kind::NonManifoldVertex: return "non_manifold_vertex";
    case Defect::Kind::DuplicateFace: return "duplicate_face";
    case Defect::Kind::IsolatedVertex: return "isolated_vertex";
  }
  return "unknown";
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

Face sorted_face(Face f) {
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

MeshDiagnostics validate(const IndexedMesh& mesh) {
  MeshDiagnostics diag;
  const int nv = mesh.num_vertices();

  // Undirected edge -> (incident face count, directed uses a->b with a<b, reverse uses).
  struct EdgeUse {
    int faces = 0;
    int forward = 0;
    int backward = 0;
  };
  std::map<std::pair<int, int>, EdgeUse> edges;
  std::map<Face, int> seen_faces;
  std::vector<std::vector<int>> vertex_faces(nv);

  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces[f];
    auto [it, inserted] = seen_faces.emplace(sorted_face(face), f);
    if (!inserted) diag.defects.push_back({Defect::Kind::DuplicateFace, it->second, f});
    for (int i = 0; i < 3; ++i) {
      const int a = face[i], b = face[(i + 1) % 3];
      EdgeUse& use = edges[{std::min(a, b), std::max(a, b)}];
      ++use.faces;
      (a < b ? use.forward : use.backward) += 1;
      vertex_faces[a].push_back(f);
    }
  }

  bool edges_ok = true;
  for (const auto& [key, use] : edges) {
    if (use.faces == 1) {
      diag.defects.push_back({Defect::Kind::BoundaryEdge, key.first, key.second});
      edges_ok = false;
    } else if (use.faces > 2) {
      diag.defects.push_back({Defect::Kind::NonManifoldEdge, key.first, key.second});
      edges_ok = false;
    } else if (use.forward != 1 || use.backward != 1) {
      diag.defects.push_back({Defect::Kind::InconsistentOrientation, key.first, key.second});
      edges_ok = false;
    }
  }
  diag.is_watertight = std::all_of(edges.begin(), edges.end(),
                                   [](const auto& kv) { return kv.second.faces == 2; });

  // A vertex is manifold when the link edges of its incident faces form one closed cycle.
  bool vertices_ok = true;
  int referenced = 0;
  for (int v = 0; v < nv; ++v) {
    const auto& incident = vertex_faces[v];
    if (incident.empty()) {
      diag.defects.push_back({Defect::Kind::IsolatedVertex, v, -1});
      continue;
    }
    ++referenced;
    std::unordered_map<int, int> link_next;
    bool ok = true;
    for (int f : incident) {
      const Face& face = mesh.faces[f];
      const int i = face[0] == v ? 0 : (face[1] == v ? 1 : 2);
      const int a = face[(i + 1) % 3], b = face[(i + 2) % 3];
      if (!link_next.emplace(a, b).second) ok = false;
    }
    if (ok) {
      int start = link_next.begin()->first, cur = start, steps = 0;
      do {
        auto it = link_next.find(cur);
        if (it == link_next.end()) {
          ok = false;
          break;
        }
        cur = it->second;
        ++steps;
      } while (cur != start && steps <= static_cast<int>(link_next.size()));
      ok = ok && cur == start && steps == static_cast<int>(link_next.size());
    }
    if (!ok) {
      diag.defects.push_back({Defect::Kind::NonManifoldVertex, v, -1});
      vertices_ok = false;
    }
  }

  const bool duplicates = std::any_of(diag.defects.begin(), diag.defects.end(), [](const Defect& d) {
    return d.kind == Defect::Kind::DuplicateFace;
  });
  diag.is_manifold = edges_ok && vertices_ok && !duplicates;

  UnionFind uf(nv);
  for (const Face& f : mesh.faces) {
    uf.unite(f[0], f[1]);
    uf.unite(f[1], f[2]);
  }
  for (int v = 0; v < nv; ++v)
    if (!vertex_faces[v].empty() && uf.find(v) == v) ++diag.components;

  diag.euler_characteristic = referenced - static_cast<int>(edges.size()) + mesh.num_faces();
  diag.genus = (2 * diag.components - diag.euler_characteristic) / 2;
  return diag;
}

double bbox_diagonal(const IndexedMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Eigen::AlignedBox3d box;
  for (const Vec3& v : mesh.vertices) box.extend(v);
  return box.diagonal().norm();
}

double degenerate_area_threshold(const IndexedMesh& mesh) {
  const double d = bbox_diagonal(mesh);
  return 1e-12 * d * d;
}

IndexedMesh repair_mesh(const IndexedMesh& mesh) {
  const double tol = 1e-9 * bbox_diagonal(mesh);
  const int nv = mesh.num_vertices();

  // Sort-and-sweep along x; welds each vertex onto the earliest representative within tol.
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return mesh.vertices[a].x() < mesh.vertices[b].x() ||
           (mesh.vertices[a].x() == mesh.vertices[b].x() && a < b);
  });
  std::vector<int> rep(nv);
  std::iota(rep.begin(), rep.end(), 0);
  for (int i = 0; i < nv; ++i) {
    const int a = order[i];
    for (int j = i - 1; j >= 0; --j) {
      const int b = order[j];
      if (mesh.vertices[a].x() - mesh.vertices[b].x() > tol) break;
      if (rep[b] == b && b < a && (mesh.vertices[a] - mesh.vertices[b]).norm() <= tol) {
        if (rep[a] == a || b < rep[a]) rep[a] = b;
      }
    }
  }

  IndexedMesh out;
  std::vector<int> remap(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (rep[v] != v) continue;
    remap[v] = out.num_vertices();
    out.vertices.push_back(mesh.vertices[v]);
  }
  std::map<Face, int> seen;
  for (const Face& f : mesh.faces) {
    Face g{remap[rep[f[0]]], remap[rep[f[1]]], remap[rep[f[2]]]};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
    if (!seen.emplace(sorted_face(g), 0).second) continue;
    out.faces.push_back(g);
  }
  return out;
}

void check_faces(const IndexedMesh& mesh) {
  const double eps = degenerate_area_threshold(mesh);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces[f];
    for (int v : face)
      if (v < 0 || v >= mesh.num_vertices())
        throw Error(ErrorCode::InvalidFace, "face " + std::to_string(f) + " index out of range");
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      throw Error(ErrorCode::InvalidFace, "face " + std::to_string(f) + " repeats a vertex");
    if (face_area(mesh, f) <= eps)
      throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " has zero area");
  }
}

NormalizedMesh normalize_unit_box(const IndexedMesh& mesh) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::DegenerateExtent, "empty mesh");
  Eigen::AlignedBox3d box;
  for (const Vec3& v : mesh.vertices) box.extend(v);
  const double extent = box.sizes().maxCoeff();
  if (!(extent > 0.0)) throw Error(ErrorCode::DegenerateExtent, "zero-size bounding box");

  NormalizedMesh out;
  out.transform.scale = 1.0 / extent;
  out.transform.offset = -box.min() * out.transform.scale;
  out.mesh.faces = mesh.faces;
  out.mesh.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) {
    // Subtract first so a mesh already in the unit box maps onto itself exactly.
    out.mesh.vertices.push_back((v - box.min()) * out.transform.scale);
  }
  return out;
}

double face_area(const IndexedMesh& mesh, int f) {
  const Face& face = mesh.faces[f];
  const Vec3& a = mesh.vertices[face[0]];
  return 0.5 * (mesh.vertices[face[1]] - a).cross(mesh.vertices[face[2]] - a).norm();
}

std::vector<double> face_areas(const IndexedMesh& mesh) {
  std::vector<double> areas(mesh.faces.size());
  for (int f = 0; f < mesh.num_faces(); ++f) areas[f] = face_area(mesh, f);
  return areas;
}

double surface_area(const IndexedMesh& mesh) {
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) total += face_area(mesh, f);
  return total;
}

Vec3 face_normal(const IndexedMesh& mesh, int f) {
  const Face& face = mesh.faces[f];
  const Vec3& a = mesh.vertices[face[0]];
  const Vec3 n = (mesh.vertices[face[1]] - a).cross(mesh.vertices[face[2]] - a);
  const double len = n.norm();
  if (!(len > 2.0 * degenerate_area_threshold(mesh)))
    throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " has zero area");
  return n / len;
}

Vec3 eval_point(const IndexedMesh& mesh, const SurfacePoint& p) {
  if (p.face < 0 || p.face >= mesh.num_faces())
    throw Error(ErrorCode::InvalidFace, "face " + std::to_string(p.face) + " does not exist");
  const Face& f = mesh.faces[p.face];
  return p.bary[0] * mesh.vertices[f[0]] + p.bary[1] * mesh.vertices[f[1]] +
         p.bary[2] * mesh.vertices[f[2]];
}

Vec3 point_normal(const IndexedMesh& mesh, const SurfacePoint& p) {
  if (p.face < 0 || p.face >= mesh.num_faces())
    throw Error(ErrorCode::InvalidFace, "face " + std::to_string(p.face) + " does not exist");
  return face_normal(mesh, p.face);
}

Vec3 point_normal(const IndexedMesh& mesh, const SurfacePoint& p, NormalMode mode,
                  std::span<const Vec3> vertex_normals) {
  if (mode == NormalMode::Face) return point_normal(mesh, p);
  if (p.face < 0 || p.face >= mesh.num_faces())
    throw Error(ErrorCode::InvalidFace, "face " + std::to_string(p.face) + " does not exist");
  const Face& f = mesh.faces[p.face];
  const Vec3 n = p.bary[0] * vertex_normals[f[0]] + p.bary[1] * vertex_normals[f[1]] +
                 p.bary[2] * vertex_normals[f[2]];
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : face_normal(mesh, p.face);
}

std::vector<Vec3> area_weighted_vertex_normals(const IndexedMesh& mesh) {
  std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
  for (const Face& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3 n = (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a);
    for (int v : f) normals[v] += n;
  }
  for (Vec3& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

namespace {

// Mixed Voronoi contribution of one triangle to each of its corners.
std::array<double, 3> corner_voronoi_areas(const IndexedMesh& mesh, int f, double eps) {
  const Face& face = mesh.faces[f];
  const Vec3 p[3] = {mesh.vertices[face[0]], mesh.vertices[face[1]], mesh.vertices[face[2]]};
  const double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
  if (!(area > eps))
    throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " has zero area");

  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const Vec3 e1 = p[(i + 1) % 3] - p[i];
    const Vec3 e2 = p[(i + 2) % 3] - p[i];
    if (e1.dot(e2) < 0.0) {
      // Obtuse at corner i.
      out[i] = area / 2.0;
      out[(i + 1) % 3] = area / 4.0;
      out[(i + 2) % 3] = area / 4.0;
      return out;
    }
  }
  // Non-obtuse: circumcentric cell, 1/8 (|e|^2 cot of opposite angle) per adjacent edge.
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const Vec3 eij = p[j] - p[i];
    const Vec3 eik = p[k] - p[i];
    // cot at k for edge ij, cot at j for edge ik.
    const Vec3 kj = p[j] - p[k], ki = p[i] - p[k];
    const double cot_k = kj.dot(ki) / kj.cross(ki).norm();
    const Vec3 jk = p[k] - p[j], ji = p[i] - p[j];
    const double cot_j = jk.dot(ji) / jk.cross(ji).norm();
    out[i] = (eij.squaredNorm() * cot_k + eik.squaredNorm() * cot_j) / 8.0;
  }
  return out;
}

}  // namespace

std::vector<double> mixed_voronoi_areas(const IndexedMesh& mesh) {
  const double eps = degenerate_area_threshold(mesh);
  const int nf = mesh.num_faces();
  std::vector<std::array<double, 3>> corners(nf);
  bool degenerate = false;
  int bad_face = -1;

#pragma omp parallel for schedule(static)
  for (int f = 0; f < nf; ++f) {
    try {
      corners[f] = corner_voronoi_areas(mesh, f, eps);
    } catch (const Error&) {
#pragma omp critical
      {
        degenerate = true;
        if (bad_face < 0 || f < bad_face) bad_face = f;
      }
    }
  }
  if (degenerate)
    throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(bad_face) + " has zero area");

  // Scatter in face order so the result is bit-identical to the serial path.
  std::vector<double> areas(mesh.vertices.size(), 0.0);
  for (int f = 0; f < nf; ++f)
    for (int i = 0; i < 3; ++i) areas[mesh.faces[f][i]] += corners[f][i];
  return areas;
}

namespace serial {

std::vector<double> mixed_voronoi_areas(const IndexedMesh& mesh) {
  const double eps = degenerate_area_threshold(mesh);
  std::vector<double> areas(mesh.vertices.size(), 0.0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto c = corner_voronoi_areas(mesh, f, eps);
    for (int i = 0; i < 3; ++i) areas[mesh.faces[f][i]] += c[i];
  }
  return areas;
}

}  // namespace serial

}  // namespace meshpatch
