#pragma once

#include "meshpatch/mesh.hpp"

#include <array>
#include <vector>

namespace meshpatch {

/// Integer barycentric corner of a topology unit; coordinates sum to 2^level.
using LatticeCorner = std::array<int, 3>;

struct TopologyUnitId {
  int coarse_face = 0;
  int local = 0;  // recursive quadrant path, 2 bits per level, most significant first

  friend bool operator==(const TopologyUnitId&, const TopologyUnitId&) = default;
};

/// Quadrant digits of the 1-to-4 split, in index order.
enum class Quadrant : int { CornerA = 0, CornerB = 1, CornerC = 2, Center = 3 };

/// Corner lattice coordinates of sub-triangle `local` after `level` 1-to-4
/// splits of the reference triangle. Same for every coarse face.
std::array<LatticeCorner, 3> unit_corners(int level, int local);

/// Topology-only 1-to-4 subdivision of every coarse face (no vertex update).
class SubdividedTopology {
 public:
  SubdividedTopology() = default;
  SubdividedTopology(int coarse_faces, int level);

  int level() const { return level_; }
  int coarse_faces() const { return coarse_faces_; }
  int units_per_face() const { return units_per_face_; }
  int unit_count() const { return coarse_faces_ * units_per_face_; }

  int global_index(const TopologyUnitId& u) const { return u.coarse_face * units_per_face_ + u.local; }
  TopologyUnitId unit(int global) const { return {global / units_per_face_, global % units_per_face_}; }

  const std::array<LatticeCorner, 3>& corners(int local) const { return corners_[local]; }
  /// Corner barycentrics of a unit on its coarse face.
  std::array<Bary, 3> corner_barys(int local) const;

  /// Neighbouring unit across edge i (opposite corner i), or -1 when the
  /// topology was built without a coarse mesh.
  int neighbor(int global, int edge) const {
    return adjacency_.empty() ? -1 : adjacency_[3 * global + edge];
  }
  bool has_adjacency() const { return !adjacency_.empty(); }

 private:
  friend SubdividedTopology subdivide(const IndexedMesh& coarse, int level);

  int coarse_faces_ = 0;
  int level_ = 0;
  int units_per_face_ = 1;
  std::vector<std::array<LatticeCorner, 3>> corners_;
  std::vector<int> adjacency_;
};

SubdividedTopology subdivide(int coarse_face_count, int level);

/// Same, plus unit adjacency across coarse-face borders taken from `coarse`.
SubdividedTopology subdivide(const IndexedMesh& coarse, int level);

/// Flat subdivided mesh: M^0's geometry with the lattice vertices inserted
/// (shared across coarse edges). unit_vertices[global] lists a unit's three
/// vertices in corner order.
struct SubdividedMesh {
  IndexedMesh mesh;
  std::vector<std::array<int, 3>> unit_vertices;
};
SubdividedMesh build_subdivided_mesh(const IndexedMesh& coarse, int level);

/// Affine map from a unit's local barycentric to its coarse face.
Bary unit_to_coarse_bary(const SubdividedTopology& topo, const TopologyUnitId& u, const Bary& local);

struct UnitLocation {
  int local = 0;
  Bary bary;  // barycentric inside the unit
};

/// Inverse of unit_to_coarse_bary: which unit of a coarse face contains the
/// point. Boundary points go to the first matching quadrant in index order.
UnitLocation coarse_bary_to_unit(int level, const Bary& coarse);

struct PatchLayout {
  int patch_count = 0;       // real + zero-fill
  int real_patches = 0;
  int padding = 0;
  int units_per_patch = 0;
  std::vector<int> patch_to_face;  // real patches only (1:1 with coarse faces)
  std::vector<int> unit_order;     // local unit index for each slot, identical for all patches
};

/// One patch per coarse face. A positive `patch_budget` pads with zero-fill
/// patches up to that count and throws PatchBudgetExceeded if it is too small.
PatchLayout build_patch_layout(const SubdividedTopology& topo, int patch_budget = 0);

}  // namespace meshpatch
