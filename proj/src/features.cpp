#include "meshpatch/features.hpp"

#include <algorithm>
#include <map>

namespace meshpatch {

PatchTensor pack_patches(const SampledFeatures& features, const PatchLayout& layout) {
  if (features.units_per_face != layout.units_per_patch ||
      features.unit_count() != layout.real_patches * layout.units_per_patch)
    throw Error(ErrorCode::ShapeMismatch, "features do not match the patch layout");

  PatchTensor t;
  t.patches = layout.patch_count;
  t.units_per_patch = layout.units_per_patch;
  t.k = features.k;
  t.data.assign(static_cast<std::size_t>(t.patches) * t.row_length(), 0.0f);
  t.avg_position.assign(static_cast<std::size_t>(t.patches) * 3, 0.0f);
  t.mask.assign(t.patches, 0);

  for (int p = 0; p < layout.real_patches; ++p) {
    const int face = layout.patch_to_face[p];
    float* row = t.data.data() + static_cast<std::size_t>(p) * t.row_length();
    Vec3 sum = Vec3::Zero();
    for (int slot = 0; slot < layout.units_per_patch; ++slot) {
      const int global = face * layout.units_per_patch + layout.unit_order[slot];
      const auto pts = features.unit(global);
      for (int i = 0; i < t.k; ++i) {
        float* out = row + static_cast<std::size_t>(slot * t.k + i) * kChannels;
        for (int c = 0; c < 3; ++c) {
          out[c] = static_cast<float>(pts[i].position[c]);
          out[3 + c] = static_cast<float>(pts[i].normal[c]);
        }
        sum += pts[i].position;
      }
    }
    const Vec3 avg = sum / static_cast<double>(layout.units_per_patch * t.k);
    for (int c = 0; c < 3; ++c) t.avg_position[3 * p + c] = static_cast<float>(avg[c]);
    t.mask[p] = 1;
  }
  return t;
}

std::vector<int> labels_to_units(std::span<const int> face_labels, const SampledFeatures& features) {
  std::vector<int> out(features.unit_count());
  for (int u = 0; u < features.unit_count(); ++u) {
    std::map<int, int> votes;
    for (const PointFeature& p : features.unit(u)) {
      if (p.source.face < 0 || p.source.face >= static_cast<int>(face_labels.size()))
        throw Error(ErrorCode::MissingLabel, "no label for face " + std::to_string(p.source.face));
      ++votes[face_labels[p.source.face]];
    }
    // std::map iterates labels ascending, so the first maximum is the smallest label.
    int best = -1, best_count = 0;
    for (const auto& [label, count] : votes)
      if (count > best_count) {
        best = label;
        best_count = count;
      }
    out[u] = best;
  }
  return out;
}

std::vector<int> face_centroid_units(const SimplificationTrace& trace, const SubdividedTopology& topo) {
  const BijectionMap bij(trace);
  std::vector<int> out(trace.original.faces.size());
  for (int f = 0; f < trace.original.num_faces(); ++f) {
    const SurfacePoint on_coarse = bij.forward({f, Bary::Constant(1.0 / 3.0)});
    const UnitLocation loc = coarse_bary_to_unit(topo.level(), on_coarse.bary);
    out[f] = topo.global_index({on_coarse.face, loc.local});
  }
  return out;
}

std::vector<int> units_to_faces(std::span<const int> unit_labels, const SimplificationTrace& trace,
                                const SubdividedTopology& topo) {
  if (static_cast<int>(unit_labels.size()) != topo.unit_count())
    throw Error(ErrorCode::ShapeMismatch, "one label per topology unit required");
  std::vector<int> out;
  out.reserve(trace.original.faces.size());
  for (int u : face_centroid_units(trace, topo)) out.push_back(unit_labels[u]);
  return out;
}

Eigen::Matrix3d axis_rotation(const std::array<int, 3>& quarter_turns) {
  // Exact cos/sin for multiples of pi/2.
  auto cs = [](int q) {
    static constexpr int c[4] = {1, 0, -1, 0};
    static constexpr int s[4] = {0, 1, 0, -1};
    const int r = ((q % 4) + 4) % 4;
    return std::pair<double, double>(c[r], s[r]);
  };
  const auto [cx, sx] = cs(quarter_turns[0]);
  const auto [cy, sy] = cs(quarter_turns[1]);
  const auto [cz, sz] = cs(quarter_turns[2]);
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return rz * ry * rx;
}

AugmentResult augment(const IndexedMesh& mesh, const AugmentConfig& cfg, Rng& rng) {
  if (!(cfg.scale_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale sigma must be positive");
  AugmentResult out;
  if (cfg.anisotropic_scale) {
    const double lo = 1.0 - cfg.truncation * cfg.scale_sigma;
    const double hi = 1.0 + cfg.truncation * cfg.scale_sigma;
    for (int i = 0; i < 3; ++i) out.scale[i] = std::clamp(rng.normal(1.0, cfg.scale_sigma), lo, hi);
  }
  if (cfg.axis_rotation) {
    for (int& q : out.quarter_turns) q = static_cast<int>(rng.uniform_int(0, 3));
    out.rotation = axis_rotation(out.quarter_turns);
  }
  out.mesh.faces = mesh.faces;
  out.mesh.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) out.mesh.vertices.push_back(out.rotation * v.cwiseProduct(out.scale));
  return out;
}

}  // namespace meshpatch
