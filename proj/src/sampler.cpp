#include "meshpatch/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace meshpatch {

Bary uniform_triangle_bary(double u1, double u2) {
  const double s = std::sqrt(u1);
  return Bary(1.0 - s, s * (1.0 - u2), s * u2);
}

std::vector<CandidatePoint> stratified_candidates(const SubdividedTopology& topo, const TopologyUnitId& unit,
                                                  int m, Rng& rng) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "strata level must be >= 0");
  const auto unit_c = topo.corner_barys(unit.local);
  const int strata = 1 << (2 * m);
  const double inv = 1.0 / static_cast<double>(1 << m);
  std::vector<CandidatePoint> out(strata);
  for (int s = 0; s < strata; ++s) {
    const auto sub = unit_corners(m, s);
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const Bary in_sub = uniform_triangle_bary(u1, u2);
    Bary in_unit = Bary::Zero();
    for (int i = 0; i < 3; ++i)
      in_unit += in_sub[i] * Bary(sub[i][0] * inv, sub[i][1] * inv, sub[i][2] * inv);
    CandidatePoint& c = out[s];
    c.unit = unit;
    c.sub_area = s;
    c.bary_on_coarse = in_unit[0] * unit_c[0] + in_unit[1] * unit_c[1] + in_unit[2] * unit_c[2];
  }
  return out;
}

double jacobian_estimate(const IndexedMesh& original, std::span<const double> original_areas,
                         const SurfacePoint& mapped, const IndexedMesh& coarse,
                         std::span<const double> coarse_areas, const SurfacePoint& on_coarse) {
  auto interpolate = [](const IndexedMesh& mesh, std::span<const double> areas, const SurfacePoint& p) {
    if (p.face < 0 || p.face >= mesh.num_faces())
      throw Error(ErrorCode::InvalidFace, "face " + std::to_string(p.face) + " does not exist");
    const Face& f = mesh.faces[p.face];
    return p.bary[0] * areas[f[0]] + p.bary[1] * areas[f[1]] + p.bary[2] * areas[f[2]];
  };
  const double num = interpolate(original, original_areas, mapped);
  const double den = interpolate(coarse, coarse_areas, on_coarse);
  if (!(den > 0.0) || !(num > 0.0))
    throw Error(ErrorCode::ZeroDenominator, "non-positive interpolated Voronoi area");
  return num / den;
}

std::vector<CandidatePoint> select_top_k(std::vector<CandidatePoint> candidates, int k, Rng& rng) {
  if (k < 0 || k > static_cast<int>(candidates.size()))
    throw Error(ErrorCode::InsufficientCandidates,
                "need " + std::to_string(k) + " of " + std::to_string(candidates.size()) + " candidates");
  for (auto& c : candidates) c.weight = rng.uniform() * c.jacobian;
  std::stable_sort(candidates.begin(), candidates.end(), [](const CandidatePoint& a, const CandidatePoint& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.sub_area < b.sub_area;
  });
  candidates.resize(k);
  std::sort(candidates.begin(), candidates.end(),
            [](const CandidatePoint& a, const CandidatePoint& b) { return a.sub_area < b.sub_area; });
  return candidates;
}

SamplingContext::SamplingContext(const SimplificationTrace& trace, const SubdividedTopology& topo,
                                 const SelectionConfig& config)
    : trace_(&trace), topo_(&topo), config_(config), bijection_(trace) {
  if (topo.coarse_faces() != trace.coarse.num_faces())
    throw Error(ErrorCode::ShapeMismatch, "topology and coarse mesh disagree on face count");
  const int strata = 1 << (2 * config.strata_levels);
  if (config.k < 1 || config.k > strata)
    throw Error(ErrorCode::InsufficientCandidates,
                "k must lie in [1, " + std::to_string(strata) + "]");
  if (config.distortion_aware) {
    original_areas_ = mixed_voronoi_areas(trace.original);
    if (config.area_source == CoarseAreaSource::CoarseMesh) {
      coarse_areas_ = mixed_voronoi_areas(trace.coarse);
    } else {
      flat_ = build_subdivided_mesh(trace.coarse, topo.level());
      coarse_areas_ = mixed_voronoi_areas(flat_.mesh);
    }
  }
  if (config.normal_mode == NormalMode::InterpolatedVertex)
    vertex_normals_ = area_weighted_vertex_normals(trace.original);
}

std::uint64_t SamplingContext::unit_seed(int global_unit) const {
  return mix_seed(config_.seed, static_cast<std::uint64_t>(global_unit));
}

std::vector<CandidatePoint> SamplingContext::candidates(int global_unit, Rng& rng) const {
  const TopologyUnitId unit = topo_->unit(global_unit);
  auto cands = stratified_candidates(*topo_, unit, config_.strata_levels, rng);
  for (auto& c : cands) {
    const SurfacePoint on_coarse{unit.coarse_face, c.bary_on_coarse};
    c.mapped = bijection_.backward(on_coarse);
    if (!config_.distortion_aware) {
      c.jacobian = 1.0;
      continue;
    }
    if (config_.area_source == CoarseAreaSource::CoarseMesh) {
      c.jacobian = jacobian_estimate(trace_->original, original_areas_, c.mapped, trace_->coarse,
                                     coarse_areas_, on_coarse);
    } else {
      const UnitLocation loc = coarse_bary_to_unit(topo_->level(), c.bary_on_coarse);
      const int flat_face = topo_->global_index({unit.coarse_face, loc.local});
      c.jacobian = jacobian_estimate(trace_->original, original_areas_, c.mapped, flat_.mesh,
                                     coarse_areas_, SurfacePoint{flat_face, loc.bary});
    }
  }
  return cands;
}

void SamplingContext::sample_unit(int global_unit, std::span<PointFeature> out) const {
  Rng rng(unit_seed(global_unit));
  auto selected = select_top_k(candidates(global_unit, rng), config_.k, rng);
  for (int i = 0; i < config_.k; ++i) {
    const CandidatePoint& c = selected[i];
    PointFeature& f = out[i];
    f.source = c.mapped;
    f.position = eval_point(trace_->original, c.mapped);
    f.normal = point_normal(trace_->original, c.mapped, config_.normal_mode, vertex_normals_);
    f.jacobian = c.jacobian;
  }
}

namespace {

SampledFeatures allocate(const SubdividedTopology& topo, const SelectionConfig& config) {
  SampledFeatures out;
  out.k = config.k;
  out.level = topo.level();
  out.units_per_face = topo.units_per_face();
  out.points.resize(static_cast<std::size_t>(topo.unit_count()) * config.k);
  return out;
}

}  // namespace

SampledFeatures sample_mesh_features(const SimplificationTrace& trace, const SubdividedTopology& topo,
                                     const SelectionConfig& config) {
  const SamplingContext ctx(trace, topo, config);
  SampledFeatures out = allocate(topo, config);
  const int units = topo.unit_count();
  std::span<PointFeature> points(out.points);

  // Per-unit RNG streams make the result independent of scheduling.
  bool failed = false;
  Error first_error(ErrorCode::InvalidArgument, "");
  int first_unit = units;
#pragma omp parallel for schedule(dynamic, 64)
  for (int u = 0; u < units; ++u) {
    try {
      ctx.sample_unit(u, points.subspan(static_cast<std::size_t>(u) * config.k, config.k));
    } catch (const Error& e) {
#pragma omp critical
      {
        if (u < first_unit) {
          first_unit = u;
          first_error = e;
          failed = true;
        }
      }
    }
  }
  if (failed) throw first_error;
  return out;
}

namespace serial {

SampledFeatures sample_mesh_features(const SimplificationTrace& trace, const SubdividedTopology& topo,
                                     const SelectionConfig& config) {
  const SamplingContext ctx(trace, topo, config);
  SampledFeatures out = allocate(topo, config);
  std::span<PointFeature> points(out.points);
  for (int u = 0; u < topo.unit_count(); ++u)
    ctx.sample_unit(u, points.subspan(static_cast<std::size_t>(u) * config.k, config.k));
  return out;
}

}  // namespace serial

}  // namespace meshpatch
