#pragma once

#include "meshpatch/mesh.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace meshpatch {

/// Triangle of a collapse region expressed in chart-local vertex ids.
///
/// `face` is the working face id. Working ids are the face ids of the
/// original mesh: a face keeps its id for as long as it survives, so the
/// only per-level remapping is the final compaction into coarse ids.
/// `corners` follow the face's corner order at that level, which is what
/// barycentric triples on the face refer to.
struct ChartTriangle {
  int face = -1;
  std::array<int, 3> corners{};
};

/// Connectivity and geometry snapshot of the two sides of one collapse.
///
/// Local ids [0, boundary.size()) are the shared boundary cycle (counter-
/// clockwise seen from outside). Before the collapse, v1 and v2 take local
/// ids n and n+1; after it, the merged vertex takes id n.
struct CollapseRegion {
  std::vector<int> boundary;
  std::vector<Vec3> boundary_positions;
  Vec3 position_v1 = Vec3::Zero();
  Vec3 position_v2 = Vec3::Zero();
  Vec3 merged_position = Vec3::Zero();
  std::vector<ChartTriangle> before;
  std::vector<ChartTriangle> after;

  int boundary_size() const { return static_cast<int>(boundary.size()); }
};

/// UV placement of both sides of a collapse in one shared planar domain.
/// The first boundary_size() entries of both arrays are identical.
struct RingFlattening {
  std::vector<Vec2> uv_before;
  std::vector<Vec2> uv_after;
};

struct CollapseRecord {
  int level = 0;  // the collapse takes M^level to M^(level-1)
  int v1 = -1;
  int v2 = -1;
  int merged = -1;  // surviving vertex id (always v1)
  double cost = 0.0;
  std::array<int, 2> removed_faces{-1, -1};
  CollapseRegion region;
  RingFlattening flattening;
};

struct RejectionCounters {
  std::int64_t link_condition = 0;
  std::int64_t non_manifold = 0;
  std::int64_t normal_flip = 0;
  std::int64_t foldover = 0;
};

struct SimplificationTrace {
  IndexedMesh original;  // M^L
  IndexedMesh coarse;    // M^0, compacted ids
  std::vector<CollapseRecord> records;  // in collapse order (level L first)

  std::vector<int> coarse_to_working_face;
  std::vector<int> working_to_coarse_face;  // -1 for faces removed by a collapse
  std::vector<int> coarse_to_original_vertex;

  /// For every working face, the ascending indices of records whose
  /// pre-collapse region contains it.
  std::vector<std::vector<int>> face_records;

  RejectionCounters rejections;
  std::uint64_t seed = 0;
  int target_faces = 0;

  int num_collapses() const { return static_cast<int>(records.size()); }
};

/// Identity trace: M^0 = M^L with no collapses.
SimplificationTrace identity_trace(const IndexedMesh& mesh);

/// Fills face_records from the record list.
void index_trace(SimplificationTrace& trace);

}  // namespace meshpatch
