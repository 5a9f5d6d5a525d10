#pragma once

#include "meshpatch/mesh.hpp"

#include <vector>

namespace meshpatch {

/// Halfedge connectivity of a watertight 2-manifold triangle mesh.
///
/// Halfedge 3*f + i runs from corner i to corner (i+1)%3 of face f, so
/// next() and face() are implicit; only twins and vertex anchors are stored.
class HalfedgeMesh {
 public:
  int num_vertices() const { return static_cast<int>(vertex_out_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_halfedges() const { return static_cast<int>(twin_.size()); }
  int num_edges() const { return num_halfedges() / 2; }

  int twin(int h) const { return twin_[h]; }
  int next(int h) const { return h - h % 3 + (h + 1) % 3; }
  int prev(int h) const { return h - h % 3 + (h + 2) % 3; }
  int face(int h) const { return h / 3; }
  int origin(int h) const { return faces_[h / 3][h % 3]; }
  int dest(int h) const { return origin(next(h)); }

  /// One outgoing halfedge per vertex.
  int outgoing(int v) const { return vertex_out_[v]; }
  int face_halfedge(int f) const { return 3 * f; }

  /// Outgoing halfedges of v in counter-clockwise order.
  std::vector<int> outgoing_fan(int v) const;
  /// Vertex neighbours of v in counter-clockwise order.
  std::vector<int> one_ring(int v) const;

  const std::vector<Vec3>& positions() const { return positions_; }

  IndexedMesh to_indexed() const { return {positions_, faces_}; }

 private:
  friend HalfedgeMesh build_halfedge(const IndexedMesh& mesh);

  std::vector<Vec3> positions_;
  std::vector<Face> faces_;
  std::vector<int> twin_;
  std::vector<int> vertex_out_;
};

/// Throws NonManifoldInput unless validate() reports a watertight manifold.
HalfedgeMesh build_halfedge(const IndexedMesh& mesh);

}  // namespace meshpatch
