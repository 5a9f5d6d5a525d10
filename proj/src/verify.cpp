#include "meshpatch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace meshpatch::verify {

std::vector<SurfacePoint> rejection_sample_uniform(const IndexedMesh& mesh, int n, Rng& rng) {
  std::vector<double> cdf(mesh.faces.size());
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) cdf[f] = total += face_area(mesh, f);
  std::vector<SurfacePoint> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = rng.uniform() * total;
    const int f = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    const double s = std::sqrt(rng.uniform());
    const double u2 = rng.uniform();
    out.push_back({std::min(f, mesh.num_faces() - 1), Bary(1.0 - s, s * (1.0 - u2), s * u2)});
  }
  return out;
}

UniformityReport uniformity_chi2(std::span<const SurfacePoint> points, const IndexedMesh& mesh,
                                 double min_expected) {
  const int nf = mesh.num_faces();
  UniformityReport rep;
  rep.samples = static_cast<int>(points.size());
  if (points.empty()) throw Error(ErrorCode::TooFewSamples, "no points");

  // Breadth-first face order keeps merged bins spatially compact.
  std::map<std::pair<int, int>, std::vector<int>> edge_faces;
  for (int f = 0; f < nf; ++f)
    for (int i = 0; i < 3; ++i)
      edge_faces[std::minmax(mesh.faces[f][i], mesh.faces[f][(i + 1) % 3])].push_back(f);
  std::vector<std::vector<int>> adj(nf);
  for (const auto& [e, fs] : edge_faces)
    for (int a : fs)
      for (int b : fs)
        if (a != b) adj[a].push_back(b);
  std::vector<int> order;
  std::vector<bool> seen(nf, false);
  for (int s = 0; s < nf; ++s) {
    if (seen[s]) continue;
    std::deque<int> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      order.push_back(f);
      for (int g : adj[f])
        if (!seen[g]) {
          seen[g] = true;
          queue.push_back(g);
        }
    }
  }

  const auto areas = face_areas(mesh);
  double total_area = 0.0;
  for (double a : areas) total_area += a;
  const double n = static_cast<double>(points.size());

  rep.face_bin.assign(nf, -1);
  double acc = 0.0;
  for (int f : order) {
    if (rep.expected.empty() || acc >= min_expected) {
      rep.expected.push_back(0.0);
      acc = 0.0;
    }
    rep.face_bin[f] = static_cast<int>(rep.expected.size()) - 1;
    const double e = n * areas[f] / total_area;
    rep.expected.back() += e;
    acc += e;
  }
  // Fold an undersized tail bin into its predecessor.
  if (rep.expected.size() > 1 && rep.expected.back() < min_expected) {
    const int tail = static_cast<int>(rep.expected.size()) - 1;
    rep.expected[tail - 1] += rep.expected[tail];
    rep.expected.pop_back();
    for (int& b : rep.face_bin)
      if (b == tail) b = tail - 1;
  }
  rep.bins = static_cast<int>(rep.expected.size());
  if (rep.bins < 2 || n < 10.0 * rep.bins)
    throw Error(ErrorCode::TooFewSamples,
                std::to_string(points.size()) + " samples for " + std::to_string(rep.bins) + " bins");

  std::vector<int> face_count(nf, 0);
  rep.observed.assign(rep.bins, 0);
  for (const SurfacePoint& p : points) {
    if (p.face < 0 || p.face >= nf) throw Error(ErrorCode::InvalidFace, "sample on a missing face");
    ++face_count[p.face];
    ++rep.observed[rep.face_bin[p.face]];
  }
  for (int b = 0; b < rep.bins; ++b) {
    const double d = rep.observed[b] - rep.expected[b];
    rep.chi2 += d * d / rep.expected[b];
  }
  rep.face_residuals.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const double e = n * areas[f] / total_area;
    rep.face_residuals[f] = (face_count[f] - e) / std::sqrt(e);
  }
  return rep;
}

GridMinimum brute_force_quadric_min(const Quadric& q, const Vec3& box_min, const Vec3& box_max) {
  constexpr int kNodes = 21;
  Vec3 lo = box_min, hi = box_max;
  GridMinimum best{lo, std::numeric_limits<double>::infinity()};
  for (int level = 0; level < 3; ++level) {
    const Vec3 step = (hi - lo) / (kNodes - 1);
    for (int i = 0; i < kNodes; ++i)
      for (int j = 0; j < kNodes; ++j)
        for (int k = 0; k < kNodes; ++k) {
          const Vec3 p = lo + Vec3(i * step.x(), j * step.y(), k * step.z());
          const double c = q.evaluate(p);
          if (c < best.cost) best = {p, c};
        }
    // Zoom 10x around the best node; the new box spans one grid step either side.
    const Vec3 half = (hi - lo) / 20.0;
    lo = best.position - half;
    hi = best.position + half;
  }
  return best;
}

RoundTripReport roundtrip_report(const BijectionMap& bij, int n, Rng& rng) {
  const IndexedMesh& mesh = bij.trace().original;
  RoundTripReport rep;
  rep.diagonal = bbox_diagonal(mesh);
  double sum = 0.0;
  for (const SurfacePoint& p : rejection_sample_uniform(mesh, n, rng)) {
    ++rep.samples;
    try {
      const SurfacePoint back = bij.backward(bij.forward(p));
      const double err = (eval_point(mesh, back) - eval_point(mesh, p)).norm();
      rep.max_error = std::max(rep.max_error, err);
      sum += err;
    } catch (const Error&) {
      ++rep.failures;
      rep.max_error = std::numeric_limits<double>::infinity();
    }
  }
  const int ok = rep.samples - rep.failures;
  rep.mean_error = ok > 0 ? sum / ok : 0.0;
  return rep;
}

SimplificationTrace corrupted_trace(const SimplificationTrace& trace, double shrink) {
  SimplificationTrace out = trace;
  if (out.records.empty()) return out;
  for (Vec2& uv : out.records.back().flattening.uv_after) uv *= shrink;
  return out;
}

std::array<double, 3> triangle_mixed_areas(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double area = 0.5 * (b - a).cross(c - a).norm();
  const double angle_a = std::acos(std::clamp((b - a).normalized().dot((c - a).normalized()), -1.0, 1.0));
  const double angle_b = std::acos(std::clamp((a - b).normalized().dot((c - b).normalized()), -1.0, 1.0));
  const double angle_c = std::acos(std::clamp((a - c).normalized().dot((b - c).normalized()), -1.0, 1.0));
  const double right = std::acos(0.0);
  if (angle_a > right) return {area / 2, area / 4, area / 4};
  if (angle_b > right) return {area / 4, area / 2, area / 4};
  if (angle_c > right) return {area / 4, area / 4, area / 2};

  // Circumcenter construction: each corner owns the kite (corner, mid, O, mid).
  const Vec3 ab = b - a, ac = c - a;
  const Vec3 n = ab.cross(ac);
  const Vec3 o = a + (ac.squaredNorm() * n.cross(ab) + ab.squaredNorm() * ac.cross(n)) / (2.0 * n.squaredNorm());
  auto kite = [&](const Vec3& p, const Vec3& q, const Vec3& r) {
    const Vec3 m1 = 0.5 * (p + q), m2 = 0.5 * (p + r);
    return 0.5 * (m1 - p).cross(o - p).norm() + 0.5 * (o - p).cross(m2 - p).norm();
  };
  return {kite(a, b, c), kite(b, c, a), kite(c, a, b)};
}

}  // namespace meshpatch::verify
