#pragma once

#include "meshpatch/trace.hpp"

#include <span>

namespace meshpatch {

/// Conformal flattening of both sides of a collapse into one UV disk.
///
/// Boundary vertices go to the unit circle at angles proportional to 3D
/// arc length; interior vertices minimize the LSCM energy with the boundary
/// pinned. Planar regions are instead embedded isometrically (scaled to unit
/// circumradius), so the map is exact there. Throws FlatteningFoldover if any
/// UV triangle in either chart is not strictly positive.
RingFlattening flatten_collapse(const CollapseRegion& region);

/// Minimum signed UV area accepted as positive (charts have unit circumradius).
inline constexpr double kMinChartArea = 1e-12;
/// Barycentric snap tolerance for point location.
inline constexpr double kChartSnap = 1e-9;

struct ChartView {
  std::span<const Vec2> uv;
  std::span<const ChartTriangle> triangles;
};

inline ChartView before_chart(const CollapseRecord& r) {
  return {r.flattening.uv_before, r.region.before};
}
inline ChartView after_chart(const CollapseRecord& r) {
  return {r.flattening.uv_after, r.region.after};
}

/// Containing chart triangle and barycentric of q. Points on shared edges
/// resolve to the lowest face id; points within kChartSnap outside are
/// clamped onto the boundary. Throws PointOutsideChart otherwise.
SurfacePoint locate_uv(const ChartView& chart, const Vec2& q);

/// UV position of a point given on one of the chart's faces.
Vec2 chart_uv(const ChartView& chart, const SurfacePoint& p);

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c);

enum class MapDirection {
  Coarsen,  // M^l -> M^(l-1)
  Refine,   // M^(l-1) -> M^l
};

/// One step of the bijection through a single collapse, on working face ids.
/// Faces outside the collapse region map to themselves.
SurfacePoint map_step(const CollapseRecord& record, const SurfacePoint& p, MapDirection direction);

/// Composite point-level bijection between M^L and M^0 (and so the
/// subdivided mesh, which shares M^0's geometry).
class BijectionMap {
 public:
  explicit BijectionMap(const SimplificationTrace& trace) : trace_(&trace) {}

  /// Point on M^L (original face id) to M^0 (coarse face id).
  SurfacePoint forward(const SurfacePoint& p) const;
  /// Point on M^0 (coarse face id) to M^L (original face id).
  SurfacePoint backward(const SurfacePoint& p) const;

  const SimplificationTrace& trace() const { return *trace_; }

 private:
  const SimplificationTrace* trace_;
};

inline SurfacePoint map_forward(const BijectionMap& bij, const SurfacePoint& p) {
  return bij.forward(p);
}
inline SurfacePoint map_backward(const BijectionMap& bij, const SurfacePoint& p) {
  return bij.backward(p);
}

/// Checks all RingFlattening invariants of one record: shared boundary,
/// strictly positive UV triangles, equal covered area.
bool flattening_is_valid(const CollapseRecord& record);

}  // namespace meshpatch
