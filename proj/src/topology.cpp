#include "meshpatch/topology.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace meshpatch {

std::array<LatticeCorner, 3> unit_corners(int level, int local) {
  std::array<LatticeCorner, 3> tri{LatticeCorner{1, 0, 0}, LatticeCorner{0, 1, 0}, LatticeCorner{0, 0, 1}};
  for (int l = 0; l < level; ++l) {
    for (auto& c : tri)
      for (int& x : c) x *= 2;
    auto mid = [](const LatticeCorner& p, const LatticeCorner& q) {
      return LatticeCorner{(p[0] + q[0]) / 2, (p[1] + q[1]) / 2, (p[2] + q[2]) / 2};
    };
    const LatticeCorner ab = mid(tri[0], tri[1]);
    const LatticeCorner bc = mid(tri[1], tri[2]);
    const LatticeCorner ca = mid(tri[2], tri[0]);
    const int digit = (local >> (2 * (level - 1 - l))) & 3;
    switch (static_cast<Quadrant>(digit)) {
      case Quadrant::CornerA: tri = {tri[0], ab, ca}; break;
      case Quadrant::CornerB: tri = {ab, tri[1], bc}; break;
      case Quadrant::CornerC: tri = {ca, bc, tri[2]}; break;
      case Quadrant::Center: tri = {bc, ca, ab}; break;
    }
  }
  return tri;
}

SubdividedTopology::SubdividedTopology(int coarse_faces, int level)
    : coarse_faces_(coarse_faces), level_(level), units_per_face_(1 << (2 * level)) {
  if (level < 0 || coarse_faces < 0)
    throw Error(ErrorCode::InvalidArgument, "subdivision level and face count must be >= 0");
  corners_.reserve(units_per_face_);
  for (int u = 0; u < units_per_face_; ++u) corners_.push_back(unit_corners(level, u));
}

std::array<Bary, 3> SubdividedTopology::corner_barys(int local) const {
  const double inv = 1.0 / static_cast<double>(1 << level_);
  std::array<Bary, 3> out;
  for (int i = 0; i < 3; ++i) {
    const auto& c = corners_[local][i];
    out[i] = Bary(c[0] * inv, c[1] * inv, c[2] * inv);
  }
  return out;
}

SubdividedTopology subdivide(int coarse_face_count, int level) {
  return SubdividedTopology(coarse_face_count, level);
}

namespace {

// Global identity of a lattice point: coarse vertex, point on a coarse edge
// (measured from the smaller vertex id), or face-interior point.
using PointKey = std::tuple<int, int, int, int>;

PointKey lattice_key(const IndexedMesh& coarse, int face, const LatticeCorner& c, int n) {
  const Face& f = coarse.faces[face];
  for (int i = 0; i < 3; ++i)
    if (c[i] == n) return {0, f[i], 0, 0};
  for (int i = 0; i < 3; ++i) {
    if (c[i] != 0) continue;
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const int vj = f[j], vk = f[k];
    // Distance along the edge from the smaller vertex id.
    return vj < vk ? PointKey{1, vj, vk, c[k]} : PointKey{1, vk, vj, c[j]};
  }
  return {2, face, c[0], c[1]};
}

}  // namespace

SubdividedMesh build_subdivided_mesh(const IndexedMesh& coarse, int level) {
  const SubdividedTopology topo(coarse.num_faces(), level);
  const int n = 1 << level;
  SubdividedMesh out;
  std::map<PointKey, int> ids;
  out.unit_vertices.resize(topo.unit_count());
  for (int f = 0; f < coarse.num_faces(); ++f) {
    const Face& face = coarse.faces[f];
    for (int u = 0; u < topo.units_per_face(); ++u) {
      for (int i = 0; i < 3; ++i) {
        const LatticeCorner& c = topo.corners(u)[i];
        auto [it, inserted] = ids.emplace(lattice_key(coarse, f, c, n), out.mesh.num_vertices());
        if (inserted) {
          const Vec3 p = (c[0] * coarse.vertices[face[0]] + c[1] * coarse.vertices[face[1]] +
                          c[2] * coarse.vertices[face[2]]) /
                         static_cast<double>(n);
          out.mesh.vertices.push_back(p);
        }
        out.unit_vertices[f * topo.units_per_face() + u][i] = it->second;
      }
      out.mesh.faces.push_back(out.unit_vertices[f * topo.units_per_face() + u]);
    }
  }
  return out;
}

SubdividedTopology subdivide(const IndexedMesh& coarse, int level) {
  SubdividedTopology topo(coarse.num_faces(), level);
  const SubdividedMesh sub = build_subdivided_mesh(coarse, level);
  topo.adjacency_.assign(3 * topo.unit_count(), -1);
  std::map<std::pair<int, int>, int> edge_owner;
  for (int g = 0; g < topo.unit_count(); ++g) {
    const auto& v = sub.unit_vertices[g];
    for (int e = 0; e < 3; ++e) {
      const int a = v[(e + 1) % 3], b = v[(e + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_owner.emplace(key, 3 * g + e);
      if (!inserted) {
        topo.adjacency_[3 * g + e] = it->second / 3;
        topo.adjacency_[it->second] = g;
      }
    }
  }
  return topo;
}

Bary unit_to_coarse_bary(const SubdividedTopology& topo, const TopologyUnitId& u, const Bary& local) {
  const auto c = topo.corner_barys(u.local);
  return local[0] * c[0] + local[1] * c[1] + local[2] * c[2];
}

UnitLocation coarse_bary_to_unit(int level, const Bary& coarse) {
  UnitLocation loc;
  Bary b = coarse.cwiseMax(0.0);
  b /= b.sum();
  for (int l = 0; l < level; ++l) {
    int digit;
    if (b[0] >= 0.5) {
      digit = 0;
      b = Bary(2 * b[0] - 1, 2 * b[1], 2 * b[2]);
    } else if (b[1] >= 0.5) {
      digit = 1;
      b = Bary(2 * b[0], 2 * b[1] - 1, 2 * b[2]);
    } else if (b[2] >= 0.5) {
      digit = 2;
      b = Bary(2 * b[0], 2 * b[1], 2 * b[2] - 1);
    } else {
      // Center triangle (bc, ca, ab).
      digit = 3;
      b = Bary(1 - 2 * b[0], 1 - 2 * b[1], 1 - 2 * b[2]);
    }
    b = b.cwiseMax(0.0);
    b /= b.sum();
    loc.local = loc.local * 4 + digit;
  }
  loc.bary = b;
  return loc;
}

PatchLayout build_patch_layout(const SubdividedTopology& topo, int patch_budget) {
  PatchLayout layout;
  layout.real_patches = topo.coarse_faces();
  if (patch_budget > 0 && topo.coarse_faces() > patch_budget)
    throw Error(ErrorCode::PatchBudgetExceeded, std::to_string(topo.coarse_faces()) +
                                                    " coarse faces exceed a budget of " +
                                                    std::to_string(patch_budget));
  layout.patch_count = patch_budget > 0 ? patch_budget : topo.coarse_faces();
  layout.padding = layout.patch_count - layout.real_patches;
  layout.units_per_patch = topo.units_per_face();
  layout.patch_to_face.resize(layout.real_patches);
  for (int p = 0; p < layout.real_patches; ++p) layout.patch_to_face[p] = p;
  layout.unit_order.resize(topo.units_per_face());
  for (int u = 0; u < topo.units_per_face(); ++u) layout.unit_order[u] = u;
  return layout;
}

}  // namespace meshpatch
