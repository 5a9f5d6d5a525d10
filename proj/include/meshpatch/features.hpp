#pragma once

#include "meshpatch/rng.hpp"
#include "meshpatch/sampler.hpp"
#include "meshpatch/topology.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace meshpatch {

inline constexpr int kChannels = 6;  // x y z nx ny nz

/// Patch-major feature tensor. Row p holds [unit][point][x y z nx ny nz].
struct PatchTensor {
  int patches = 0;
  int units_per_patch = 0;
  int k = 0;
  std::vector<float> data;          // patches x row_length()
  std::vector<float> avg_position;  // patches x 3
  std::vector<std::uint8_t> mask;   // 1 real, 0 zero-fill

  int row_length() const { return units_per_patch * k * kChannels; }
  std::span<const float> row(int patch) const {
    return std::span<const float>(data).subspan(static_cast<std::size_t>(patch) * row_length(), row_length());
  }
  /// Channels of one selected point.
  std::span<const float> point(int patch, int unit_slot, int point) const {
    return row(patch).subspan(static_cast<std::size_t>(unit_slot * k + point) * kChannels, kChannels);
  }
};

PatchTensor pack_patches(const SampledFeatures& features, const PatchLayout& layout);

/// Per-unit label by majority vote of the selected points' M^L face labels;
/// ties go to the smallest label.
std::vector<int> labels_to_units(std::span<const int> face_labels, const SampledFeatures& features);

/// Labels every M^L face with the label of the unit that contains its
/// centroid's image under the bijection.
std::vector<int> units_to_faces(std::span<const int> unit_labels, const SimplificationTrace& trace,
                                const SubdividedTopology& topo);

/// Global unit index containing the image of each M^L face centroid.
std::vector<int> face_centroid_units(const SimplificationTrace& trace, const SubdividedTopology& topo);

struct AugmentConfig {
  bool anisotropic_scale = false;
  double scale_sigma = 0.1;
  double truncation = 3.0;  // in sigmas
  bool axis_rotation = false;
};

struct AugmentResult {
  IndexedMesh mesh;
  Vec3 scale = Vec3::Ones();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  std::array<int, 3> quarter_turns{0, 0, 0};  // about x, y, z
};

/// Per-axis scale from Normal(1, sigma^2) clamped to 1 +- truncation*sigma,
/// then a rotation by independent multiples of pi/2 about x, y, z.
AugmentResult augment(const IndexedMesh& mesh, const AugmentConfig& cfg, Rng& rng);

/// Exact rotation by quarter turns about x, then y, then z.
Eigen::Matrix3d axis_rotation(const std::array<int, 3>& quarter_turns);

}  // namespace meshpatch
