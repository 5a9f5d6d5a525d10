#include "meshpatch/shapes.hpp"

#include "meshpatch/rng.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <numbers>

namespace meshpatch::shapes {

IndexedMesh tetrahedron() {
  IndexedMesh m;
  m.vertices = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

IndexedMesh cube(double h) {
  IndexedMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.emplace_back(i & 1 ? h : -h, i & 2 ? h : -h, i & 4 ? h : -h);
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

IndexedMesh box_grid(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "box grid needs n >= 1");
  IndexedMesh m;
  std::map<std::array<int, 3>, int> ids;
  auto vertex = [&](std::array<int, 3> c) {
    auto [it, inserted] = ids.try_emplace(c, m.num_vertices());
    if (inserted) m.vertices.emplace_back(2.0 * c[0] / n - 1.0, 2.0 * c[1] / n - 1.0, 2.0 * c[2] / n - 1.0);
    return it->second;
  };
  for (int a = 0; a < 3; ++a) {
    const int u = (a + 1) % 3, v = (a + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto corner = [&](int di, int dj) {
            std::array<int, 3> c{};
            c[a] = side * n;
            c[u] = i + di;
            c[v] = j + dj;
            return vertex(c);
          };
          const int p00 = corner(0, 0), p10 = corner(1, 0), p11 = corner(1, 1), p01 = corner(0, 1);
          if (side == 1) {
            m.faces.push_back({p00, p10, p11});
            m.faces.push_back({p00, p11, p01});
          } else {
            m.faces.push_back({p00, p11, p10});
            m.faces.push_back({p00, p01, p11});
          }
        }
    }
  }
  return m;
}

IndexedMesh octahedron() {
  IndexedMesh m;
  m.vertices = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return m;
}

IndexedMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IndexedMesh m;
  m.vertices = {Vec3(-1, t, 0), Vec3(1, t, 0), Vec3(-1, -t, 0), Vec3(1, -t, 0),
                Vec3(0, -1, t), Vec3(0, 1, t), Vec3(0, -1, -t), Vec3(0, 1, -t),
                Vec3(t, 0, -1), Vec3(t, 0, 1), Vec3(-t, 0, -1), Vec3(-t, 0, 1)};
  for (Vec3& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return m;
}

IndexedMesh icosphere(int level) {
  IndexedMesh m = icosahedron();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoints;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      m.vertices.push_back((0.5 * (m.vertices[a] + m.vertices[b])).normalized());
      return midpoints[key] = m.num_vertices() - 1;
    };
    std::vector<Face> faces;
    for (const Face& f : m.faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      faces.push_back({f[0], ab, ca});
      faces.push_back({ab, f[1], bc});
      faces.push_back({ca, bc, f[2]});
      faces.push_back({bc, ca, ab});
    }
    m.faces = std::move(faces);
  }
  return m;
}

IndexedMesh torus(double major_radius, double minor_radius, int u_steps, int v_steps) {
  IndexedMesh m;
  for (int i = 0; i < u_steps; ++i) {
    const double u = 2.0 * std::numbers::pi * i / u_steps;
    for (int j = 0; j < v_steps; ++j) {
      const double v = 2.0 * std::numbers::pi * j / v_steps;
      const double r = major_radius + minor_radius * std::cos(v);
      m.vertices.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return (i % u_steps) * v_steps + (j % v_steps); };
  for (int i = 0; i < u_steps; ++i) {
    for (int j = 0; j < v_steps; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  }
  return m;
}

IndexedMesh convex_hull(const std::vector<Vec3>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "convex hull needs at least 4 points");

  struct HullFace {
    Face v;
    Vec3 normal;
    double offset;
    bool alive = true;
  };
  std::vector<HullFace> faces;
  auto make = [&](int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    f.normal = (points[b] - points[a]).cross(points[c] - points[a]).normalized();
    f.offset = f.normal.dot(points[a]);
    faces.push_back(f);
  };

  // Initial tetrahedron from the first four points (assumed non-coplanar).
  const Vec3 centroid = (points[0] + points[1] + points[2] + points[3]) / 4.0;
  const int tet[4][3] = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  for (const auto& t : tet) {
    make(t[0], t[1], t[2]);
    if (faces.back().normal.dot(centroid) - faces.back().offset > 0.0) {
      faces.pop_back();
      make(t[0], t[2], t[1]);
    }
  }

  const double eps = 1e-12;
  for (int p = 4; p < n; ++p) {
    std::map<std::pair<int, int>, int> horizon;  // directed edge -> count
    bool visible_any = false;
    for (auto& f : faces) {
      if (!f.alive || f.normal.dot(points[p]) - f.offset <= eps) continue;
      f.alive = false;
      visible_any = true;
      for (int i = 0; i < 3; ++i) horizon[{f.v[i], f.v[(i + 1) % 3]}]++;
    }
    if (!visible_any) continue;
    for (const auto& [e, count] : horizon) {
      if (horizon.count({e.second, e.first})) continue;  // interior to the visible set
      make(e.first, e.second, p);
    }
  }

  IndexedMesh out;
  std::vector<int> remap(n, -1);
  for (const auto& f : faces) {
    if (!f.alive) continue;
    Face g;
    for (int i = 0; i < 3; ++i) {
      if (remap[f.v[i]] < 0) {
        remap[f.v[i]] = out.num_vertices();
        out.vertices.push_back(points[f.v[i]]);
      }
      g[i] = remap[f.v[i]];
    }
    out.faces.push_back(g);
  }
  return out;
}

IndexedMesh random_convex_hull(int points, const Vec3& radii, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> pts;
  pts.reserve(points);
  while (static_cast<int>(pts.size()) < points) {
    const Vec3 d(rng.normal(0.0, 1.0), rng.normal(0.0, 1.0), rng.normal(0.0, 1.0));
    if (d.norm() < 1e-6) continue;
    pts.push_back(d.normalized().cwiseProduct(radii));
  }
  return convex_hull(pts);
}

IndexedMesh scaled(IndexedMesh mesh, const Vec3& factors) {
  for (Vec3& v : mesh.vertices) v = v.cwiseProduct(factors);
  return mesh;
}

std::vector<NamedMesh> builtin_suite() {
  return {
      {"icosphere_320", icosphere(2)},
      {"icosphere_1280", icosphere(3)},
      {"ellipsoid_1280", scaled(icosphere(3), Vec3(2.5, 1.0, 0.6))},
      {"torus_768", torus(1.0, 0.35, 24, 16)},
      {"torus_1920", torus(1.0, 0.4, 48, 20)},
      {"torus_thin_720", torus(1.0, 0.2, 36, 10)},
      {"hull_396", random_convex_hull(200, Vec3(1.0, 1.0, 1.0), 11)},
      {"hull_1196", random_convex_hull(600, Vec3(1.0, 0.7, 0.5), 12)},
      {"hull_1996", random_convex_hull(1000, Vec3(1.5, 1.0, 0.8), 13)},
      {"hull_2796", random_convex_hull(1400, Vec3(1.0, 1.0, 2.0), 14)},
  };
}

double obtuse_fraction(const IndexedMesh& mesh) {
  int obtuse = 0;
  for (const Face& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      const Vec3& p = mesh.vertices[f[i]];
      if ((mesh.vertices[f[(i + 1) % 3]] - p).dot(mesh.vertices[f[(i + 2) % 3]] - p) < 0.0) {
        ++obtuse;
        break;
      }
    }
  }
  return mesh.faces.empty() ? 0.0 : static_cast<double>(obtuse) / mesh.num_faces();
}

}  // namespace meshpatch::shapes
