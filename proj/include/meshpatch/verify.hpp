#pragma once

#include "meshpatch/rng.hpp"
#include "meshpatch/selfparam.hpp"
#include "meshpatch/simplify.hpp"

#include <span>
#include <vector>

// Brute-force oracles. Nothing here goes through the sampler's selection
// path; only mesh-core primitives are shared.
namespace meshpatch::verify {

/// Area-uniform points: face by area, then square-root barycentric.
std::vector<SurfacePoint> rejection_sample_uniform(const IndexedMesh& mesh, int n, Rng& rng);

struct UniformityReport {
  double chi2 = 0.0;
  int bins = 0;
  int samples = 0;
  int dof() const { return bins - 1; }
  std::vector<int> face_bin;            // bin of each face
  std::vector<double> expected;         // per bin
  std::vector<int> observed;            // per bin
  std::vector<double> face_residuals;   // (observed - expected) / sqrt(expected), per face
};

/// Pearson chi-square of point counts against area-proportional expectation.
/// Faces are merged along a breadth-first face ordering into bins whose
/// expected count is at least `min_expected`. Throws TooFewSamples when
/// fewer than two bins result or n < 10 x bins.
UniformityReport uniformity_chi2(std::span<const SurfacePoint> points, const IndexedMesh& mesh,
                                 double min_expected = 10.0);

struct GridMinimum {
  Vec3 position = Vec3::Zero();
  double cost = 0.0;
};

/// Three levels of 21^3 grid search, zooming 10x around the best node.
GridMinimum brute_force_quadric_min(const Quadric& q, const Vec3& box_min, const Vec3& box_max);

struct RoundTripReport {
  int samples = 0;
  int failures = 0;  // points the bijection could not map at all
  double max_error = 0.0;
  double mean_error = 0.0;
  double diagonal = 0.0;

  double relative_max() const { return diagonal > 0.0 ? max_error / diagonal : max_error; }
  bool within(double relative_tolerance) const {
    return failures == 0 && relative_max() < relative_tolerance;
  }
};

/// 3D error of backward(forward(p)) over n area-uniform points of M^L.
RoundTripReport roundtrip_report(const BijectionMap& bij, int n, Rng& rng);

/// Copy of a trace whose last collapse has its post-collapse chart shrunk
/// about the origin; a negative control for roundtrip_report.
SimplificationTrace corrupted_trace(const SimplificationTrace& trace, double shrink = 0.5);

/// Independent scalar mixed-area formula for one triangle (Meyer et al.),
/// written out per corner without shared helpers.
std::array<double, 3> triangle_mixed_areas(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace meshpatch::verify
