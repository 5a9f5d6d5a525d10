#include "meshpatch/suite.hpp"

#include "meshpatch/shapes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>

namespace meshpatch::suite {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

constexpr TargetFaces kSuiteTargets{96, 256};

SimplificationTrace simplify_named(const IndexedMesh& mesh, std::uint64_t seed) {
  const IndexedMesh norm = normalize_unit_box(mesh).mesh;
  return simplify_to(norm, draw_target_faces(kSuiteTargets, norm.num_faces(), seed), seed);
}

// Trial seeds for "suite x 2 seeds".
std::array<std::uint64_t, 2> trial_seeds(std::uint64_t seed) { return {mix_seed(seed, 100), mix_seed(seed, 101)}; }

}  // namespace

std::vector<SimplifiedMesh> simplify_suite(std::uint64_t seed) {
  const auto meshes = shapes::builtin_suite();
  std::vector<SimplifiedMesh> out(meshes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < static_cast<int>(meshes.size()); ++i)
    out[i] = {meshes[i].name, simplify_named(meshes[i].mesh, mix_seed(seed, i))};
  return out;
}

CheckResult check_roundtrip(const SuiteConfig& cfg) {
  CheckResult r{"bijection round-trip", false, 0.0, 1e-5, {}, 0.0};
  const auto t0 = Clock::now();
  const auto suite = simplify_suite(cfg.seed);
  int failures = 0;
  std::string worst;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const SimplificationTrace trace = cfg.corrupt_traces ? verify::corrupted_trace(suite[i].trace) : suite[i].trace;
    const BijectionMap bij(trace);
    Rng rng(mix_seed(cfg.seed, 1000 + i));
    const auto rep = verify::roundtrip_report(bij, cfg.roundtrip_points, rng);
    failures += rep.failures;
    if (rep.relative_max() >= r.measured) {
      r.measured = rep.relative_max();
      worst = suite[i].name;
    }
  }
  r.seconds = seconds_since(t0);
  r.passed = failures == 0 && r.measured < r.threshold && r.seconds < 60.0;
  r.detail = std::to_string(suite.size()) + " meshes x " + std::to_string(cfg.roundtrip_points) +
             " points; max error / diagonal " + fmt(r.measured) + " on " + worst + "; unmapped points " +
             std::to_string(failures) + "; " + fmt(r.seconds) + " s (limit 60 s)";
  return r;
}

CheckResult check_voronoi_partition(const SuiteConfig&) {
  CheckResult r{"Voronoi partition", false, 0.0, 1e-6, {}, 0.0};
  const auto t0 = Clock::now();
  auto meshes = shapes::builtin_suite();
  meshes.push_back({"box_grid_6", shapes::box_grid(6)});
  meshes.push_back({"tetrahedron", shapes::tetrahedron()});
  double max_obtuse = 0.0;
  for (const auto& nm : meshes) {
    const auto areas = mixed_voronoi_areas(nm.mesh);
    double sum = 0.0;
    for (double a : areas) sum += a;
    const double total = surface_area(nm.mesh);
    r.measured = std::max(r.measured, std::abs(sum - total) / total);
    max_obtuse = std::max(max_obtuse, shapes::obtuse_fraction(nm.mesh));
  }
  r.seconds = seconds_since(t0);
  r.passed = r.measured <= r.threshold && max_obtuse > 0.3;
  r.detail = std::to_string(meshes.size()) + " meshes; max relative gap " + fmt(r.measured) +
             "; largest obtuse fraction " + fmt(max_obtuse);
  return r;
}

CheckResult check_combinatorics(const SuiteConfig& cfg) {
  CheckResult r{"reference combinatorics", false, 0.0, 0.0, {}, 0.0};
  const auto t0 = Clock::now();
  const int units = subdivide(1, 3).units_per_face();
  Rng rng(cfg.seed);
  const SubdividedTopology topo = subdivide(1, 3);
  const int candidates = static_cast<int>(stratified_candidates(topo, {0, 0}, 3, rng).size());

  const IndexedMesh mesh = shapes::icosphere(2);
  std::vector<int> labels(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) labels[f] = eval_point(mesh, {f}).z() >= 0.0;
  const VariantResult cls =
      run_variant(mesh, std::nullopt, PipelineConfig::for_profile(TaskProfile::Classification), cfg.seed);
  const VariantResult seg =
      run_variant(mesh, labels, PipelineConfig::for_profile(TaskProfile::Segmentation), cfg.seed);

  const int mismatches = (units != 64) + (candidates != 64) + (cls.tensor.units_per_patch != 64) +
                         (cls.tensor.row_length() != 384) + (seg.tensor.row_length() != 6144) +
                         (cls.tensor.patches != 256) + (seg.tensor.patches != 256);
  r.measured = mismatches;
  r.passed = mismatches == 0;
  r.seconds = seconds_since(t0);
  r.detail = "units/patch " + std::to_string(units) + ", candidates/unit " + std::to_string(candidates) +
             ", row length cls " + std::to_string(cls.tensor.row_length()) + " seg " +
             std::to_string(seg.tensor.row_length()) + ", patches " + std::to_string(cls.tensor.patches);
  return r;
}

CheckResult check_identity_jacobian(const SuiteConfig& cfg) {
  CheckResult r{"identity jacobian", false, 0.0, 1e-9, {}, 0.0};
  const auto t0 = Clock::now();
  std::int64_t count = 0;
  for (const auto& nm : shapes::builtin_suite()) {
    const SimplificationTrace trace = identity_trace(normalize_unit_box(nm.mesh).mesh);
    // Reference configuration on the smallest mesh, one level elsewhere to bound runtime.
    const int level = nm.mesh.num_faces() <= 400 ? 3 : 1;
    const SubdividedTopology topo = subdivide(trace.coarse, level);
    SelectionConfig sel;
    sel.seed = cfg.seed;
    const SamplingContext ctx(trace, topo, sel);
    double worst = 0.0;
    std::int64_t n = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : worst) reduction(+ : n)
    for (int u = 0; u < topo.unit_count(); ++u) {
      Rng rng(ctx.unit_seed(u));
      for (const CandidatePoint& c : ctx.candidates(u, rng)) {
        worst = std::max(worst, std::abs(c.jacobian - 1.0));
        ++n;
      }
    }
    r.measured = std::max(r.measured, worst);
    count += n;
  }
  r.seconds = seconds_since(t0);
  r.passed = r.measured <= r.threshold;
  r.detail = std::to_string(count) + " candidates; max |J - 1| " + fmt(r.measured);
  return r;
}

CheckResult check_uniformity(const SuiteConfig& cfg) {
  CheckResult r{"distortion-aware uniformity", false, 0.0, 0.10, {}, 0.0};
  const auto t0 = Clock::now();
  const auto meshes = shapes::builtin_suite();
  std::vector<double> improvement;
  int wins = 0;
  for (std::uint64_t trial_seed : trial_seeds(cfg.seed)) {
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      const std::uint64_t seed = mix_seed(trial_seed, i);
      const SimplificationTrace trace = simplify_named(meshes[i].mesh, seed);
      const SubdividedTopology topo = subdivide(trace.coarse, 3);
      SelectionConfig sel;
      sel.seed = mix_seed(seed, 4);
      double chi2[2];
      for (int weighted = 0; weighted < 2; ++weighted) {
        sel.distortion_aware = weighted == 1;
        const SampledFeatures f = sample_mesh_features(trace, topo, sel);
        std::vector<SurfacePoint> pts;
        pts.reserve(f.points.size());
        for (const PointFeature& p : f.points) pts.push_back(p.source);
        chi2[weighted] = verify::uniformity_chi2(pts, trace.original).chi2;
      }
      wins += chi2[1] < chi2[0];
      improvement.push_back(1.0 - chi2[1] / chi2[0]);
    }
  }
  std::vector<double> sorted = improvement;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  r.measured = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  r.seconds = seconds_since(t0);
  r.passed = wins >= 16 && r.measured >= r.threshold && r.seconds < 300.0;
  r.detail = "weighted chi2 lower in " + std::to_string(wins) + "/" + std::to_string(n) +
             " trials (need 16); median improvement " + fmt(100.0 * r.measured) + "% (need 10%); range [" +
             fmt(100.0 * sorted.front()) + "%, " + fmt(100.0 * sorted.back()) + "%]; " + fmt(r.seconds) + " s";
  return r;
}

CheckResult check_qem_optimality(const SuiteConfig& cfg) {
  CheckResult r{"QEM optimality", false, 0.0, 1e-4, {}, 0.0};
  const auto t0 = Clock::now();
  Rng rng(mix_seed(cfg.seed, 7));
  int violations = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    // Sum of random weighted planes passing near a random point: PSD by construction.
    const Vec3 center(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    Quadric q;
    const int planes = 3 + static_cast<int>(rng.uniform_int(0, 5));
    for (int p = 0; p < planes; ++p) {
      const Vec3 n = Vec3(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1)).normalized();
      const double d = -n.dot(center) + rng.normal(0.0, 0.05);
      q += Quadric::from_plane(n, d, rng.uniform(0.1, 2.0));
    }
    const Vec3 v1(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 v2(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double closed = optimal_position(q, v1, v2).cost;
    const double grid = verify::brute_force_quadric_min(q, Vec3::Constant(-1.5), Vec3::Constant(1.5)).cost;
    const double excess = (closed - grid) / std::max(std::abs(grid), 1e-12);
    worst_excess = std::max(worst_excess, excess);
    if (closed > grid + r.threshold * std::abs(grid) + 1e-15) ++violations;
  }

  // Planar-region collapses on a gridded box.
  const SimplificationTrace box = simplify_to(shapes::box_grid(6), 96, cfg.seed);
  int planar = 0;
  double planar_worst = 0.0;
  for (const CollapseRecord& rec : box.records) {
    const CollapseRegion& g = rec.region;
    auto pos = [&](int id) -> const Vec3& {
      const int nb = g.boundary_size();
      return id < nb ? g.boundary_positions[id] : id == nb ? g.position_v1 : g.position_v2;
    };
    Vec3 ref = Vec3::Zero();
    bool flat = true;
    for (const ChartTriangle& t : g.before) {
      const Vec3 n = (pos(t.corners[1]) - pos(t.corners[0])).cross(pos(t.corners[2]) - pos(t.corners[0])).normalized();
      if (ref.isZero()) ref = n;
      else if (n.dot(ref) < 1.0 - 1e-12) flat = false;
    }
    if (!flat) continue;
    ++planar;
    planar_worst = std::max(planar_worst, rec.cost);
  }
  r.measured = worst_excess;
  r.seconds = seconds_since(t0);
  r.passed = violations == 0 && planar > 0 && planar_worst < 1e-9;
  r.detail = "100 random PSD quadrics: " + std::to_string(violations) + " above grid oracle, worst relative excess " +
             fmt(worst_excess) + "; " + std::to_string(planar) + " planar collapses, max cost " + fmt(planar_worst);
  return r;
}

CheckResult check_label_roundtrip(const SuiteConfig& cfg) {
  CheckResult r{"label round-trip", false, 0.0, 0.95, {}, 0.0};
  const auto t0 = Clock::now();
  const IndexedMesh mesh = shapes::icosphere(3);
  std::vector<int> labels(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) labels[f] = eval_point(mesh, {f}).z() >= 0.0 ? 1 : 0;

  PipelineConfig pc = PipelineConfig::for_profile(TaskProfile::Segmentation);
  pc.target_faces = {160, 160};
  const VariantResult v = run_variant(mesh, labels, pc, cfg.seed);
  // Band: faces whose centroid lies within 0.1 of the equator (unit sphere).
  constexpr double kBand = 0.1;
  int kept = 0, agree = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (std::abs(eval_point(mesh, {f}).z()) < kBand) continue;
    ++kept;
    agree += (*v.face_labels_from_units)[f] == labels[f];
  }
  r.measured = kept > 0 ? static_cast<double>(agree) / kept : 0.0;
  r.seconds = seconds_since(t0);
  r.passed = r.measured >= r.threshold;
  r.detail = std::to_string(agree) + "/" + std::to_string(kept) + " faces outside the |z| < 0.1 band keep their label (" +
             std::to_string(mesh.num_faces() - kept) + " band faces excluded)";
  return r;
}

namespace {

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a)) files.push_back(e.path().filename());
  std::size_t count_b = std::distance(fs::directory_iterator(b), fs::directory_iterator{});
  if (files.size() != count_b) {
    why = "file count differs";
    return false;
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  for (const auto& name : files) {
    if (!fs::exists(b / name) || slurp(a / name) != slurp(b / name)) {
      why = name.string() + " differs";
      return false;
    }
  }
  return true;
}

}  // namespace

CheckResult check_batch_determinism(const SuiteConfig& cfg) {
  CheckResult r{"batch determinism", false, 0.0, 0.0, {}, 0.0};
  const auto t0 = Clock::now();
  const fs::path root = cfg.scratch_dir.empty()
                            ? fs::temp_directory_path() / ("meshpatch_determinism_" + std::to_string(cfg.seed))
                            : cfg.scratch_dir;
  fs::remove_all(root);
  const fs::path in = root / "input";
  fs::create_directories(in);
  const auto meshes = shapes::builtin_suite();
  for (int i : {0, 3, 6}) {
    std::ofstream out(in / (meshes[i].name + ".obj"));
    write_obj(out, meshes[i].mesh);
  }
  {
    std::ofstream lab(in / (meshes[0].name + ".labels"));
    for (int f = 0; f < meshes[0].mesh.num_faces(); ++f) lab << (eval_point(meshes[0].mesh, {f}).x() > 0.0) << '\n';
  }
  std::ofstream(in / "broken.off") << "OFF\n3 1 0\n0 0 0\n1 0 0\n";

  PipelineConfig pc = PipelineConfig::for_profile(TaskProfile::Segmentation);
  pc.variants = 2;
  pc.seed = cfg.seed;
  pc.augment.anisotropic_scale = true;
  pc.augment.axis_rotation = true;
  const ExportManifest m1 = batch(in, pc, root / "jobs1", 1);
  batch(in, pc, root / "jobs8", 8);
  batch(in, pc, root / "jobs8_rerun", 8);

  std::string why;
  const bool same = same_tree(root / "jobs1", root / "jobs8", why) && same_tree(root / "jobs8", root / "jobs8_rerun", why);
  const bool complete = m1.entries.size() == 6 && m1.skipped.size() == 1;
  r.measured = same ? 0.0 : 1.0;
  r.passed = same && complete;
  r.seconds = seconds_since(t0);
  r.detail = std::to_string(m1.entries.size()) + " entries, " + std::to_string(m1.skipped.size()) +
             " skipped; outputs at jobs 1, 8 and an 8-job rerun " + (same ? "are bit-identical" : "differ: " + why);
  fs::remove_all(root);
  return r;
}

CheckResult check_simplification_guards(const SuiteConfig& cfg) {
  CheckResult r{"simplification guards", false, 0.0, 0.0, {}, 0.0};
  const auto t0 = Clock::now();
  int invalid_coarse = 0, invalid_charts = 0, runs = 0;
  std::int64_t collapses = 0;
  RejectionCounters total;
  for (std::uint64_t trial_seed : trial_seeds(cfg.seed)) {
    for (const SimplifiedMesh& sm : simplify_suite(trial_seed)) {
      ++runs;
      const MeshDiagnostics d = validate(sm.trace.coarse);
      invalid_coarse += !(d.is_manifold && d.is_watertight);
      for (const CollapseRecord& rec : sm.trace.records) invalid_charts += !flattening_is_valid(rec);
      collapses += sm.trace.num_collapses();
      total.link_condition += sm.trace.rejections.link_condition;
      total.non_manifold += sm.trace.rejections.non_manifold;
      total.normal_flip += sm.trace.rejections.normal_flip;
      total.foldover += sm.trace.rejections.foldover;
    }
  }
  r.measured = invalid_coarse + invalid_charts;
  r.passed = invalid_coarse == 0 && invalid_charts == 0;
  r.seconds = seconds_since(t0);
  r.detail = std::to_string(runs) + " runs, " + std::to_string(collapses) + " collapses: " +
             std::to_string(invalid_coarse) + " invalid coarse meshes, " + std::to_string(invalid_charts) +
             " invalid accepted charts; rejections link " + std::to_string(total.link_condition) + ", manifold " +
             std::to_string(total.non_manifold) + ", flip " + std::to_string(total.normal_flip) + ", foldover " +
             std::to_string(total.foldover);
  return r;
}

std::vector<CheckResult> run_suite(const SuiteConfig& cfg) {
  const std::vector<std::pair<const char*, std::function<CheckResult(const SuiteConfig&)>>> checks = {
      {"bijection round-trip", check_roundtrip},
      {"Voronoi partition", check_voronoi_partition},
      {"reference combinatorics", check_combinatorics},
      {"identity jacobian", check_identity_jacobian},
      {"distortion-aware uniformity", check_uniformity},
      {"QEM optimality", check_qem_optimality},
      {"label round-trip", check_label_roundtrip},
      {"batch determinism", check_batch_determinism},
      {"simplification guards", check_simplification_guards},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    try {
      out.push_back(fn(cfg));
    } catch (const std::exception& e) {
      out.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), 0.0, std::string("error: ") + e.what(), 0.0});
    }
  }
  return out;
}

nlohmann::json to_json(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const CheckResult& c : results) {
    all = all && c.passed;
    checks.push_back({{"name", c.name}, {"passed", c.passed},
                      {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr)},
                      {"threshold", c.threshold}, {"detail", c.detail}, {"seconds", c.seconds}});
  }
  return {{"passed", all}, {"checks", checks}};
}

}  // namespace meshpatch::suite
