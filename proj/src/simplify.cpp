#include "meshpatch/simplify.hpp"

#include "meshpatch/rng.hpp"
#include "meshpatch/selfparam.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace meshpatch {

Quadric Quadric::from_plane(const Vec3& n, double d, double weight) {
  const Eigen::Vector4d p(n.x(), n.y(), n.z(), d);
  Quadric q;
  q.m = weight * p * p.transpose();
  return q;
}

double Quadric::evaluate(const Vec3& p) const {
  const Eigen::Vector4d h(p.x(), p.y(), p.z(), 1.0);
  return h.dot(m * h);
}

std::vector<Quadric> initial_quadrics(const IndexedMesh& mesh) {
  std::vector<Quadric> q(mesh.vertices.size());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Vec3 n = face_normal(mesh, f);
    const double d = -n.dot(mesh.vertices[mesh.faces[f][0]]);
    const Quadric plane = Quadric::from_plane(n, d, face_area(mesh, f));
    for (int v : mesh.faces[f]) q[v] += plane;
  }
  return q;
}

OptimalPosition optimal_position(const Quadric& q, const Vec3& v1, const Vec3& v2) {
  const Eigen::Matrix3d a = q.m.topLeftCorner<3, 3>();
  const Vec3 b = q.m.topRightCorner<3, 1>();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(a, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (hi > 0.0 && lo > 0.0 && hi / lo <= 1e8) {
    const Vec3 x = a.ldlt().solve(-b);
    if (x.allFinite()) return {x, q.evaluate(x), false};
  }

  OptimalPosition best{v1, q.evaluate(v1), true};
  for (const Vec3& p : {v2, Vec3(0.5 * (v1 + v2))}) {
    const double c = q.evaluate(p);
    if (c < best.cost) best = {p, c, true};
  }
  return best;
}

SimplificationTrace identity_trace(const IndexedMesh& mesh) {
  SimplificationTrace t;
  t.original = mesh;
  t.coarse = mesh;
  t.target_faces = mesh.num_faces();
  t.coarse_to_working_face.resize(mesh.faces.size());
  for (int f = 0; f < mesh.num_faces(); ++f) t.coarse_to_working_face[f] = f;
  t.working_to_coarse_face = t.coarse_to_working_face;
  t.coarse_to_original_vertex.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.num_vertices(); ++v) t.coarse_to_original_vertex[v] = v;
  index_trace(t);
  return t;
}

void index_trace(SimplificationTrace& trace) {
  trace.face_records.assign(trace.original.faces.size(), {});
  for (int r = 0; r < trace.num_collapses(); ++r)
    for (const auto& t : trace.records[r].region.before) trace.face_records[t.face].push_back(r);
}

namespace {

struct HeapEntry {
  double key;
  std::uint64_t tie;
  int a, b;
  std::uint32_t version_a, version_b;
};

struct HeapOrder {
  bool operator()(const HeapEntry& x, const HeapEntry& y) const {
    // std::priority_queue pops the largest; invert for a min-queue.
    if (x.key != y.key) return x.key > y.key;
    if (x.tie != y.tie) return x.tie > y.tie;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

class Simplifier {
 public:
  Simplifier(const IndexedMesh& mesh, std::uint64_t seed, const SimplifyOptions& options)
      : positions_(mesh.vertices),
        faces_(mesh.faces),
        face_alive_(mesh.faces.size(), true),
        vertex_faces_(mesh.vertices.size()),
        version_(mesh.vertices.size(), 0),
        quadrics_(initial_quadrics(mesh)),
        rng_(seed),
        options_(options),
        eps_area_(degenerate_area_threshold(mesh)),
        alive_faces_(mesh.num_faces()),
        alive_vertices_(mesh.num_vertices()) {
    for (int f = 0; f < mesh.num_faces(); ++f)
      for (int v : faces_[f]) vertex_faces_[v].push_back(f);
  }

  void run(int target, SimplificationTrace& trace) {
    for (int v = 0; v < static_cast<int>(positions_.size()); ++v) push_vertex_edges(v);
    int level = (alive_faces_ - target) / 2;
    while (alive_faces_ > target) {
      if (heap_.empty())
        throw Error(ErrorCode::TargetUnreachable,
                    "no valid collapse left at " + std::to_string(alive_faces_) + " faces");
      const HeapEntry e = heap_.top();
      heap_.pop();
      if (version_[e.a] != e.version_a || version_[e.b] != e.version_b) continue;
      if (vertex_faces_[e.a].empty() || vertex_faces_[e.b].empty()) continue;
      CollapseRecord record;
      if (!try_collapse(e.a, e.b, trace.rejections, record)) continue;
      record.level = level--;
      trace.records.push_back(std::move(record));
    }
    finish(trace);
  }

 private:
  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (int f : vertex_faces_[v])
      for (int w : faces_[f])
        if (w != v) out.push_back(w);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void push_edge(int a, int b) {
    if (a > b) std::swap(a, b);
    const OptimalPosition opt = optimal_position(quadrics_[a] + quadrics_[b], positions_[a], positions_[b]);
    const double jitter = std::exp(rng_.uniform(-options_.cost_jitter, options_.cost_jitter));
    heap_.push({std::max(opt.cost, 0.0) * jitter, rng_.next(), a, b, version_[a], version_[b]});
  }

  void push_vertex_edges(int v) {
    for (int w : neighbors(v))
      if (v < w) push_edge(v, w);
  }

  Vec3 normal_of(const Face& f) const {
    return (positions_[f[1]] - positions_[f[0]]).cross(positions_[f[2]] - positions_[f[0]]);
  }

  bool try_collapse(int a, int b, RejectionCounters& rejections, CollapseRecord& record) {
    // Link condition: the shared neighbours must be exactly the two opposite vertices.
    std::vector<int> shared_faces;
    for (int f : vertex_faces_[a]) {
      const Face& face = faces_[f];
      if (face[0] == b || face[1] == b || face[2] == b) shared_faces.push_back(f);
    }
    const auto na = neighbors(a);
    const auto nb = neighbors(b);
    std::vector<int> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
    if (shared_faces.size() != 2 || common.size() != 2 || alive_vertices_ <= 4) {
      ++rejections.link_condition;
      return false;
    }

    // Region and its boundary cycle (edges of region faces away from a and b).
    std::vector<int> region = vertex_faces_[a];
    region.insert(region.end(), vertex_faces_[b].begin(), vertex_faces_[b].end());
    std::sort(region.begin(), region.end());
    region.erase(std::unique(region.begin(), region.end()), region.end());

    std::unordered_map<int, int> next;
    for (int f : region) {
      if (f == shared_faces[0] || f == shared_faces[1]) continue;
      const Face& face = faces_[f];
      const int c = (face[0] == a || face[0] == b) ? 0 : ((face[1] == a || face[1] == b) ? 1 : 2);
      if (!next.emplace(face[(c + 1) % 3], face[(c + 2) % 3]).second) {
        ++rejections.non_manifold;
        return false;
      }
    }
    int start = next.begin()->first;
    for (const auto& kv : next) start = std::min(start, kv.first);
    std::vector<int> boundary;
    for (int v = start;;) {
      boundary.push_back(v);
      auto it = next.find(v);
      if (it == next.end()) {
        ++rejections.non_manifold;
        return false;
      }
      v = it->second;
      if (v == start) break;
      if (boundary.size() > next.size()) {
        ++rejections.non_manifold;
        return false;
      }
    }
    if (boundary.size() != next.size() || boundary.size() < 3) {
      ++rejections.non_manifold;
      return false;
    }

    const OptimalPosition opt = optimal_position(quadrics_[a] + quadrics_[b], positions_[a], positions_[b]);

    // Normal flip and degeneracy check on the surviving region faces.
    for (int f : region) {
      if (f == shared_faces[0] || f == shared_faces[1]) continue;
      Face moved = faces_[f];
      for (int& v : moved)
        if (v == a || v == b) v = -1;
      const Vec3 old_n = normal_of(faces_[f]);
      const Vec3 p0 = moved[0] < 0 ? opt.position : positions_[moved[0]];
      const Vec3 p1 = moved[1] < 0 ? opt.position : positions_[moved[1]];
      const Vec3 p2 = moved[2] < 0 ? opt.position : positions_[moved[2]];
      const Vec3 new_n = (p1 - p0).cross(p2 - p0);
      if (0.5 * new_n.norm() <= eps_area_ || old_n.dot(new_n) <= 0.0) {
        ++rejections.normal_flip;
        return false;
      }
    }

    const int n = static_cast<int>(boundary.size());
    std::unordered_map<int, int> local;
    for (int i = 0; i < n; ++i) local[boundary[i]] = i;
    local[a] = n;
    local[b] = n + 1;

    record.v1 = a;
    record.v2 = b;
    record.merged = a;
    record.cost = opt.cost;
    record.removed_faces = {shared_faces[0], shared_faces[1]};
    CollapseRegion& r = record.region;
    r.boundary = boundary;
    for (int v : boundary) r.boundary_positions.push_back(positions_[v]);
    r.position_v1 = positions_[a];
    r.position_v2 = positions_[b];
    r.merged_position = opt.position;
    for (int f : region) {
      const Face& face = faces_[f];
      ChartTriangle before{f, {local[face[0]], local[face[1]], local[face[2]]}};
      r.before.push_back(before);
      if (f == shared_faces[0] || f == shared_faces[1]) continue;
      ChartTriangle after = before;
      for (int& c : after.corners)
        if (c == n + 1) c = n;
      r.after.push_back(after);
    }

    try {
      record.flattening = flatten_collapse(r);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FlatteningFoldover) throw;
      ++rejections.foldover;
      return false;
    }

    apply(a, b, opt.position, shared_faces);
    return true;
  }

  void apply(int a, int b, const Vec3& position, const std::vector<int>& removed) {
    positions_[a] = position;
    quadrics_[a] += quadrics_[b];
    for (int f : removed) {
      face_alive_[f] = false;
      for (int v : faces_[f]) {
        auto& list = vertex_faces_[v];
        list.erase(std::remove(list.begin(), list.end(), f), list.end());
      }
    }
    for (int f : vertex_faces_[b]) {
      for (int& v : faces_[f])
        if (v == b) v = a;
      vertex_faces_[a].push_back(f);
    }
    vertex_faces_[b].clear();
    std::sort(vertex_faces_[a].begin(), vertex_faces_[a].end());
    alive_faces_ -= 2;
    --alive_vertices_;

    ++version_[b];
    const auto ring = neighbors(a);
    ++version_[a];
    for (int w : ring) ++version_[w];
    push_vertex_edges(a);
    for (int w : ring)
      for (int x : neighbors(w))
        if (x != a && w < x) push_edge(w, x);
  }

  void finish(SimplificationTrace& trace) {
    std::vector<int> vertex_map(positions_.size(), -1);
    IndexedMesh& coarse = trace.coarse;
    for (int v = 0; v < static_cast<int>(positions_.size()); ++v) {
      if (vertex_faces_[v].empty()) continue;
      vertex_map[v] = coarse.num_vertices();
      coarse.vertices.push_back(positions_[v]);
      trace.coarse_to_original_vertex.push_back(v);
    }
    trace.working_to_coarse_face.assign(faces_.size(), -1);
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      if (!face_alive_[f]) continue;
      trace.working_to_coarse_face[f] = coarse.num_faces();
      trace.coarse_to_working_face.push_back(f);
      coarse.faces.push_back({vertex_map[faces_[f][0]], vertex_map[faces_[f][1]], vertex_map[faces_[f][2]]});
    }
  }

  std::vector<Vec3> positions_;
  std::vector<Face> faces_;
  std::vector<bool> face_alive_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<std::uint32_t> version_;
  std::vector<Quadric> quadrics_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap_;
  Rng rng_;
  SimplifyOptions options_;
  double eps_area_;
  int alive_faces_;
  int alive_vertices_;
};

}  // namespace

SimplificationTrace simplify_to(const IndexedMesh& mesh, int target_faces, std::uint64_t seed,
                                const SimplifyOptions& options) {
  const MeshDiagnostics diag = validate(mesh);
  if (!diag.is_watertight || !diag.is_manifold)
    throw Error(ErrorCode::NonManifoldInput, "simplification needs a watertight 2-manifold");
  check_faces(mesh);
  if (target_faces < 4)
    throw Error(ErrorCode::InvalidArgument, "target_faces must be at least 4");
  if (target_faces > mesh.num_faces() || (mesh.num_faces() - target_faces) % 2 != 0)
    throw Error(ErrorCode::TargetUnreachable,
                "cannot reach " + std::to_string(target_faces) + " faces from " +
                    std::to_string(mesh.num_faces()) + " by edge collapses");

  SimplificationTrace trace;
  trace.original = mesh;
  trace.seed = seed;
  trace.target_faces = target_faces;
  Simplifier(mesh, seed, options).run(target_faces, trace);
  index_trace(trace);
  return trace;
}

IndexedMesh replay_trace(const SimplificationTrace& trace) {
  std::vector<Vec3> positions = trace.original.vertices;
  std::vector<Face> faces = trace.original.faces;
  std::vector<bool> alive(faces.size(), true);
  for (const CollapseRecord& r : trace.records) {
    positions[r.merged] = r.region.merged_position;
    for (int f : r.removed_faces) alive[f] = false;
    for (const ChartTriangle& t : r.region.after)
      for (int& v : faces[t.face])
        if (v == r.v2) v = r.v1;
  }
  IndexedMesh out;
  std::vector<int> map(positions.size(), -1);
  std::vector<bool> used(positions.size(), false);
  for (std::size_t f = 0; f < faces.size(); ++f)
    if (alive[f])
      for (int v : faces[f]) used[v] = true;
  for (std::size_t v = 0; v < positions.size(); ++v) {
    if (!used[v]) continue;
    map[v] = out.num_vertices();
    out.vertices.push_back(positions[v]);
  }
  for (std::size_t f = 0; f < faces.size(); ++f)
    if (alive[f]) out.faces.push_back({map[faces[f][0]], map[faces[f][1]], map[faces[f][2]]});
  return out;
}

}  // namespace meshpatch
