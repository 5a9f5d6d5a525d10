#pragma once

#include "meshpatch/trace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace meshpatch {

/// Sum of squared distances to a set of planes, stored as a symmetric 4x4 matrix.
struct Quadric {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();

  /// weight * (n.p + d)^2 for the plane n.p + d = 0 (n unit length).
  static Quadric from_plane(const Vec3& n, double d, double weight);

  double evaluate(const Vec3& p) const;

  Quadric& operator+=(const Quadric& o) {
    m += o.m;
    return *this;
  }
  friend Quadric operator+(Quadric a, const Quadric& b) { return a += b; }
};

/// Area-weighted sum of incident face-plane quadrics, one per vertex.
std::vector<Quadric> initial_quadrics(const IndexedMesh& mesh);

struct OptimalPosition {
  Vec3 position = Vec3::Zero();
  double cost = 0.0;
  bool fallback = false;  // near-singular system; picked among v1, v2, midpoint
};

/// Minimizer of the quadric form. Systems with a condition estimate above
/// 1e8 fall back to the cheapest of v1, v2 and their midpoint.
OptimalPosition optimal_position(const Quadric& q, const Vec3& v1, const Vec3& v2);

struct SimplifyOptions {
  /// Half-width of the log-uniform cost jitter that generates variants.
  double cost_jitter = 0.1;
};

/// Guarded QEM edge collapse down to exactly `target_faces` faces.
///
/// Every accepted collapse passed the link condition, the post-collapse
/// manifold check, the normal-flip check and a fold-free flattening of its
/// 1-ring region. The seed drives the cost jitter and tie-breaking; equal
/// inputs give identical traces.
SimplificationTrace simplify_to(const IndexedMesh& mesh, int target_faces, std::uint64_t seed,
                                const SimplifyOptions& options = {});

/// Applies the recorded collapses to trace.original; reproduces trace.coarse.
IndexedMesh replay_trace(const SimplificationTrace& trace);

}  // namespace meshpatch
