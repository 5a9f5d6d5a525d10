#pragma once

#include "meshpatch/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace meshpatch::shapes {

IndexedMesh tetrahedron();
IndexedMesh cube(double half_extent = 1.0);
IndexedMesh octahedron();
IndexedMesh icosahedron();

/// Surface of [-1,1]^3 with an n x n quad grid per side, 12 n^2 faces.
IndexedMesh box_grid(int n);

/// Icosahedron refined `level` times, projected to the unit sphere: 20*4^level faces.
IndexedMesh icosphere(int level);

/// Torus with major radius R and minor radius r on a u x v grid (2uv faces).
IndexedMesh torus(double major_radius, double minor_radius, int u_steps, int v_steps);

/// Convex hull of points drawn on an axis-aligned ellipsoid with the given
/// radii. Every point lies on the hull, so the result has 2n-4 faces.
IndexedMesh random_convex_hull(int points, const Vec3& radii, std::uint64_t seed);

/// Convex hull of arbitrary points in general position (incremental).
IndexedMesh convex_hull(const std::vector<Vec3>& points);

/// Scales vertex coordinates per axis.
IndexedMesh scaled(IndexedMesh mesh, const Vec3& factors);

struct NamedMesh {
  std::string name;
  IndexedMesh mesh;
};

/// The ten closed meshes (300 to 3000 faces) used by the built-in suite.
std::vector<NamedMesh> builtin_suite();

/// Fraction of faces with an angle above 90 degrees.
double obtuse_fraction(const IndexedMesh& mesh);

}  // namespace meshpatch::shapes
