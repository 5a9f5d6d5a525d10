#include "meshpatch/selfparam.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace meshpatch {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

namespace {

std::vector<Vec3> local_positions(const CollapseRegion& region, bool before) {
  std::vector<Vec3> pos = region.boundary_positions;
  if (before) {
    pos.push_back(region.position_v1);
    pos.push_back(region.position_v2);
  } else {
    pos.push_back(region.merged_position);
  }
  return pos;
}

bool chart_positive(std::span<const Vec2> uv, std::span<const ChartTriangle> tris) {
  return std::all_of(tris.begin(), tris.end(), [&](const ChartTriangle& t) {
    return signed_area(uv[t.corners[0]], uv[t.corners[1]], uv[t.corners[2]]) > kMinChartArea;
  });
}

// Least-squares conformal energy with every vertex below `first_free` pinned.
//
// Each triangle contributes the complex residual sum_j W_j U_j / sqrt(2A),
// W_j = z_{j+2} - z_{j+1} in an isometric local frame of the 3D triangle.
// The residual vanishes exactly for orientation-preserving similarities.
bool solve_lscm(std::span<const Vec3> pos, std::span<const ChartTriangle> tris, int first_free,
                std::vector<Vec2>& uv) {
  const int nfree = static_cast<int>(pos.size()) - first_free;
  if (nfree == 0) return true;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * tris.size(), 2 * nfree);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * tris.size());

  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& c = tris[t].corners;
    const Vec3 e1 = pos[c[1]] - pos[c[0]];
    const Vec3 e2 = pos[c[2]] - pos[c[0]];
    const Vec3 n = e1.cross(e2);
    const double twice_area = n.norm();
    if (!(twice_area > 0.0)) return false;
    const Vec3 xa = e1.normalized();
    const Vec3 ya = n.normalized().cross(xa);
    const Vec2 z[3] = {Vec2::Zero(), Vec2(e1.dot(xa), 0.0), Vec2(e2.dot(xa), e2.dot(ya))};
    const double scale = 1.0 / std::sqrt(twice_area);

    for (int j = 0; j < 3; ++j) {
      const Vec2 w = (z[(j + 2) % 3] - z[(j + 1) % 3]) * scale;
      const int v = c[j];
      if (v >= first_free) {
        const int col = 2 * (v - first_free);
        a(2 * t, col) += w.x();
        a(2 * t, col + 1) -= w.y();
        a(2 * t + 1, col) += w.y();
        a(2 * t + 1, col + 1) += w.x();
      } else {
        rhs(2 * t) -= w.x() * uv[v].x() - w.y() * uv[v].y();
        rhs(2 * t + 1) -= w.y() * uv[v].x() + w.x() * uv[v].y();
      }
    }
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(rhs);
  if (!x.allFinite()) return false;
  for (int i = 0; i < nfree; ++i) uv[first_free + i] = Vec2(x(2 * i), x(2 * i + 1));
  return true;
}

// Isometric embedding when every region vertex lies on one plane.
bool planar_embedding(const CollapseRegion& region, RingFlattening& out) {
  const auto before = local_positions(region, true);
  const auto after = local_positions(region, false);

  Vec3 normal = Vec3::Zero();
  for (const auto& t : region.before) {
    const auto& c = t.corners;
    normal += (before[c[1]] - before[c[0]]).cross(before[c[2]] - before[c[0]]);
  }
  if (!(normal.norm() > 0.0)) return false;
  normal.normalize();

  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : region.boundary_positions) centroid += p;
  centroid /= static_cast<double>(region.boundary_size());

  double radius = 0.0;
  for (const Vec3& p : region.boundary_positions) radius = std::max(radius, (p - centroid).norm());
  if (!(radius > 0.0)) return false;

  const double tol = 1e-9 * radius;
  for (const Vec3& p : before)
    if (std::abs((p - centroid).dot(normal)) > tol) return false;
  if (std::abs((region.merged_position - centroid).dot(normal)) > tol) return false;

  const Vec3 xa = (region.boundary_positions[0] - centroid).normalized();
  const Vec3 ya = normal.cross(xa);
  auto project = [&](const Vec3& p) {
    const Vec3 d = (p - centroid) / radius;
    return Vec2(d.dot(xa), d.dot(ya));
  };
  out.uv_before.clear();
  out.uv_after.clear();
  for (const Vec3& p : before) out.uv_before.push_back(project(p));
  for (const Vec3& p : after) out.uv_after.push_back(project(p));
  return chart_positive(out.uv_before, region.before) && chart_positive(out.uv_after, region.after);
}

}  // namespace

RingFlattening flatten_collapse(const CollapseRegion& region) {
  const int n = region.boundary_size();
  if (n < 3) throw Error(ErrorCode::FlatteningFoldover, "boundary cycle shorter than 3");

  RingFlattening out;
  if (planar_embedding(region, out)) return out;

  std::vector<double> cumulative(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    cumulative[i + 1] =
        cumulative[i] + (region.boundary_positions[(i + 1) % n] - region.boundary_positions[i]).norm();
  }
  const double perimeter = cumulative[n];
  if (!(perimeter > 0.0)) throw Error(ErrorCode::FlatteningFoldover, "zero-length boundary");

  std::vector<Vec2> boundary(n);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * cumulative[i] / perimeter;
    boundary[i] = Vec2(std::cos(theta), std::sin(theta));
  }

  out.uv_before = boundary;
  out.uv_before.resize(n + 2, Vec2::Zero());
  out.uv_after = boundary;
  out.uv_after.resize(n + 1, Vec2::Zero());

  const auto before = local_positions(region, true);
  const auto after = local_positions(region, false);
  if (!solve_lscm(before, region.before, n, out.uv_before) ||
      !solve_lscm(after, region.after, n, out.uv_after))
    throw Error(ErrorCode::FlatteningFoldover, "degenerate triangle in collapse region");

  if (!chart_positive(out.uv_before, region.before))
    throw Error(ErrorCode::FlatteningFoldover, "pre-collapse chart folds over");
  if (!chart_positive(out.uv_after, region.after))
    throw Error(ErrorCode::FlatteningFoldover, "post-collapse chart folds over");
  return out;
}

bool flattening_is_valid(const CollapseRecord& record) {
  const int n = record.region.boundary_size();
  const auto& f = record.flattening;
  if (static_cast<int>(f.uv_before.size()) != n + 2 || static_cast<int>(f.uv_after.size()) != n + 1)
    return false;
  for (int i = 0; i < n; ++i)
    if (f.uv_before[i] != f.uv_after[i]) return false;
  if (!chart_positive(f.uv_before, record.region.before) ||
      !chart_positive(f.uv_after, record.region.after))
    return false;

  auto total = [](std::span<const Vec2> uv, std::span<const ChartTriangle> tris) {
    double sum = 0.0;
    for (const auto& t : tris) sum += signed_area(uv[t.corners[0]], uv[t.corners[1]], uv[t.corners[2]]);
    return sum;
  };
  std::vector<Vec2> polygon(f.uv_before.begin(), f.uv_before.begin() + n);
  double polygon_area = 0.0;
  for (int i = 0; i < n; ++i) polygon_area += signed_area(Vec2::Zero(), polygon[i], polygon[(i + 1) % n]);
  const double tol = 1e-9 * std::max(1.0, std::abs(polygon_area));
  return std::abs(total(f.uv_before, record.region.before) - polygon_area) <= tol &&
         std::abs(total(f.uv_after, record.region.after) - polygon_area) <= tol;
}

Vec2 chart_uv(const ChartView& chart, const SurfacePoint& p) {
  for (const auto& t : chart.triangles) {
    if (t.face != p.face) continue;
    return p.bary[0] * chart.uv[t.corners[0]] + p.bary[1] * chart.uv[t.corners[1]] +
           p.bary[2] * chart.uv[t.corners[2]];
  }
  throw Error(ErrorCode::PointOutsideChart, "face " + std::to_string(p.face) + " not in chart");
}

SurfacePoint locate_uv(const ChartView& chart, const Vec2& q) {
  // Exact containment wins (lowest face id among ties); otherwise the
  // least-violating triangle within the snap tolerance.
  int inside = -1, nearest = -1;
  Bary inside_bary, nearest_bary;
  double nearest_min = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < chart.triangles.size(); ++i) {
    const auto& t = chart.triangles[i];
    const Vec2& a = chart.uv[t.corners[0]];
    const Vec2& b = chart.uv[t.corners[1]];
    const Vec2& c = chart.uv[t.corners[2]];
    const double area = signed_area(a, b, c);
    const Bary bary(signed_area(q, b, c) / area, signed_area(a, q, c) / area,
                    signed_area(a, b, q) / area);
    const double lo = bary.minCoeff();
    if (lo >= 0.0) {
      if (inside < 0 || t.face < chart.triangles[inside].face) {
        inside = static_cast<int>(i);
        inside_bary = bary;
      }
    } else if (lo > nearest_min ||
               (lo == nearest_min && t.face < chart.triangles[nearest].face)) {
      nearest_min = lo;
      nearest = static_cast<int>(i);
      nearest_bary = bary;
    }
  }

  SurfacePoint out;
  if (inside >= 0) {
    out.face = chart.triangles[inside].face;
    out.bary = inside_bary / inside_bary.sum();
    return out;
  }
  if (nearest >= 0 && nearest_min >= -kChartSnap) {
    Bary clamped = nearest_bary.cwiseMax(0.0);
    out.face = chart.triangles[nearest].face;
    out.bary = clamped / clamped.sum();
    return out;
  }
  throw Error(ErrorCode::PointOutsideChart, "uv point outside chart");
}

SurfacePoint map_step(const CollapseRecord& record, const SurfacePoint& p, MapDirection direction) {
  const ChartView from = direction == MapDirection::Coarsen ? before_chart(record) : after_chart(record);
  const ChartView to = direction == MapDirection::Coarsen ? after_chart(record) : before_chart(record);
  const bool touched = std::any_of(from.triangles.begin(), from.triangles.end(),
                                   [&](const ChartTriangle& t) { return t.face == p.face; });
  if (!touched) return p;
  return locate_uv(to, chart_uv(from, p));
}

SurfacePoint BijectionMap::forward(const SurfacePoint& p) const {
  const auto& trace = *trace_;
  if (p.face < 0 || p.face >= trace.original.num_faces())
    throw Error(ErrorCode::InvalidFace, "face " + std::to_string(p.face) + " not on M^L");
  SurfacePoint cur = p;
  int next_record = 0;
  for (;;) {
    const auto& touching = trace.face_records[cur.face];
    auto it = std::lower_bound(touching.begin(), touching.end(), next_record);
    if (it == touching.end()) break;
    cur = map_step(trace.records[*it], cur, MapDirection::Coarsen);
    next_record = *it + 1;
  }
  cur.face = trace.working_to_coarse_face[cur.face];
  if (cur.face < 0) throw Error(ErrorCode::PointOutsideChart, "point ended on a removed face");
  return cur;
}

SurfacePoint BijectionMap::backward(const SurfacePoint& p) const {
  const auto& trace = *trace_;
  if (p.face < 0 || p.face >= trace.coarse.num_faces())
    throw Error(ErrorCode::InvalidFace, "face " + std::to_string(p.face) + " not on M^0");
  SurfacePoint cur = p;
  cur.face = trace.coarse_to_working_face[p.face];
  int before_record = trace.num_collapses();
  for (;;) {
    const auto& touching = trace.face_records[cur.face];
    auto it = std::lower_bound(touching.begin(), touching.end(), before_record);
    if (it == touching.begin()) break;
    --it;
    cur = map_step(trace.records[*it], cur, MapDirection::Refine);
    before_record = *it;
  }
  return cur;
}

}  // namespace meshpatch
