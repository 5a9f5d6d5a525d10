#include "meshpatch/halfedge.hpp"

#include <map>

namespace meshpatch {

HalfedgeMesh build_halfedge(const IndexedMesh& mesh) {
  const MeshDiagnostics diag = validate(mesh);
  if (!diag.is_watertight || !diag.is_manifold) {
    std::string what = "mesh is not a watertight 2-manifold";
    if (!diag.defects.empty()) {
      const Defect& d = diag.defects.front();
      what += " (first defect: " + std::string(to_string(d.kind)) + " at " + std::to_string(d.a) +
              ")";
    }
    throw Error(ErrorCode::NonManifoldInput, what);
  }

  HalfedgeMesh he;
  he.positions_ = mesh.vertices;
  he.faces_ = mesh.faces;
  he.twin_.assign(3 * mesh.faces.size(), -1);
  he.vertex_out_.assign(mesh.vertices.size(), -1);

  std::map<std::pair<int, int>, int> directed;
  for (int h = 0; h < he.num_halfedges(); ++h) {
    directed[{he.origin(h), he.dest(h)}] = h;
    if (he.vertex_out_[he.origin(h)] < 0) he.vertex_out_[he.origin(h)] = h;
  }
  for (int h = 0; h < he.num_halfedges(); ++h) {
    // Watertight and consistently oriented, so the reverse halfedge exists.
    he.twin_[h] = directed.at({he.dest(h), he.origin(h)});
  }
  return he;
}

std::vector<int> HalfedgeMesh::outgoing_fan(int v) const {
  std::vector<int> fan;
  const int start = vertex_out_[v];
  if (start < 0) return fan;
  int h = start;
  do {
    fan.push_back(h);
    h = twin(prev(h));  // counter-clockwise around v
  } while (h != start);
  return fan;
}

std::vector<int> HalfedgeMesh::one_ring(int v) const {
  std::vector<int> ring;
  for (int h : outgoing_fan(v)) ring.push_back(dest(h));
  return ring;
}

}  // namespace meshpatch
