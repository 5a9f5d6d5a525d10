#pragma once

#include "meshpatch/rng.hpp"
#include "meshpatch/selfparam.hpp"
#include "meshpatch/topology.hpp"
#include "meshpatch/trace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace meshpatch {

struct CandidatePoint {
  TopologyUnitId unit;
  int sub_area = 0;       // stratum index inside the unit, recursive order
  Bary bary_on_coarse;    // on the unit's coarse face of M
  SurfacePoint mapped;    // on M^L, through the inverse bijection
  double jacobian = 1.0;  // |det(dp^L/dp)| estimate, > 0
  double weight = 0.0;    // Uniform[0, jacobian] draw used for ranking
};

/// Which surface supplies the per-vertex areas on the M side.
enum class CoarseAreaSource {
  CoarseMesh,      // M^0 vertices, interpolated with the coarse-face barycentric
  SubdividedFlat,  // lattice vertices of the flat subdivided mesh
};

struct SelectionConfig {
  int strata_levels = 3;  // candidates per unit = 4^m
  int k = 1;
  std::uint64_t seed = 0;
  bool distortion_aware = true;  // false: every candidate weighted 1
  CoarseAreaSource area_source = CoarseAreaSource::CoarseMesh;
  NormalMode normal_mode = NormalMode::Face;
};

/// One area-uniform candidate in each of the 4^m strata of a unit. Only
/// unit, sub_area and bary_on_coarse are filled.
std::vector<CandidatePoint> stratified_candidates(const SubdividedTopology& topo, const TopologyUnitId& unit,
                                                  int m, Rng& rng);

/// Area-uniform barycentric from two uniforms (square-root transform).
Bary uniform_triangle_bary(double u1, double u2);

/// Ratio of barycentrically interpolated vertex areas, M^L over M.
/// `coarse_areas`/`coarse_bary`/`coarse_face` describe the M side.
double jacobian_estimate(const IndexedMesh& original, std::span<const double> original_areas,
                         const SurfacePoint& mapped, const IndexedMesh& coarse,
                         std::span<const double> coarse_areas, const SurfacePoint& on_coarse);

/// Draws weight ~ Uniform[0, jacobian] for every candidate, keeps the k
/// largest (ties by ascending sub_area) and returns them in sub_area order.
std::vector<CandidatePoint> select_top_k(std::vector<CandidatePoint> candidates, int k, Rng& rng);

struct PointFeature {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  SurfacePoint source;  // location on M^L
  double jacobian = 1.0;
};

struct SampledFeatures {
  int k = 0;
  int level = 0;
  int units_per_face = 0;
  std::vector<PointFeature> points;  // unit-major, k per unit

  std::span<const PointFeature> unit(int global) const {
    return std::span<const PointFeature>(points).subspan(static_cast<std::size_t>(global) * k, k);
  }
  int unit_count() const { return k == 0 ? 0 : static_cast<int>(points.size()) / k; }
};

/// Everything sampling needs that is shared by all units.
class SamplingContext {
 public:
  SamplingContext(const SimplificationTrace& trace, const SubdividedTopology& topo,
                  const SelectionConfig& config);

  /// Candidates of one unit with mapping and jacobian filled, before selection.
  std::vector<CandidatePoint> candidates(int global_unit, Rng& rng) const;
  /// Full per-unit pipeline; writes k features into `out`.
  void sample_unit(int global_unit, std::span<PointFeature> out) const;

  std::uint64_t unit_seed(int global_unit) const;

  const SubdividedTopology& topology() const { return *topo_; }
  const SelectionConfig& config() const { return config_; }

 private:
  const SimplificationTrace* trace_;
  const SubdividedTopology* topo_;
  SelectionConfig config_;
  BijectionMap bijection_;
  std::vector<double> original_areas_;
  std::vector<double> coarse_areas_;
  SubdividedMesh flat_;  // only for CoarseAreaSource::SubdividedFlat
  std::vector<Vec3> vertex_normals_;
};

/// Samples every unit; units run in parallel. Output is bit-identical to
/// serial::sample_mesh_features for any thread count.
SampledFeatures sample_mesh_features(const SimplificationTrace& trace, const SubdividedTopology& topo,
                                     const SelectionConfig& config);

namespace serial {
SampledFeatures sample_mesh_features(const SimplificationTrace& trace, const SubdividedTopology& topo,
                                     const SelectionConfig& config);
}  // namespace serial

}  // namespace meshpatch
