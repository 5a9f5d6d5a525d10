// Command-line front end: prep, batch, inspect, verify.

#include "meshpatch/pipeline.hpp"
#include "meshpatch/suite.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace meshpatch;
namespace fs = std::filesystem;

struct PipelineFlags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> variants;
  std::optional<std::string> profile;
  std::optional<std::string> target_faces;
  std::optional<int> subdiv;
  std::optional<int> strata;
  std::optional<int> select;
  std::optional<int> patch_budget;
  bool augment = false;
  bool unweighted = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Base random seed");
    app->add_option("--variants", variants, "Simplification variants per mesh");
    app->add_option("--profile", profile, "Task profile: cls (k=1) or seg (k=16)")
        ->check(CLI::IsMember({"cls", "seg"}));
    app->add_option("--target-faces", target_faces, "Coarse face count N or range MIN:MAX");
    app->add_option("--subdiv", subdiv, "Subdivision levels s");
    app->add_option("--strata", strata, "Strata levels m (4^m candidates per unit)");
    app->add_option("--select", select, "Points selected per unit (k)");
    app->add_option("--patch-budget", patch_budget, "Patches per mesh after zero-fill");
    app->add_flag("--augment", augment, "Random anisotropic scaling and axis rotations");
    app->add_flag("--unweighted", unweighted, "Disable distortion-aware selection");
  }

  PipelineConfig build() const {
    TaskProfile base_profile = TaskProfile::Classification;
    nlohmann::json file_json;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      try {
        file_json = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, config_file + ": " + e.what());
      }
      if (file_json.contains("profile")) base_profile = profile_from_string(file_json["profile"].get<std::string>());
    }
    if (profile) base_profile = profile_from_string(*profile);
    PipelineConfig c = PipelineConfig::for_profile(base_profile);
    if (!file_json.is_null()) c = config_from_json(file_json, c);
    if (profile) {
      c.profile = base_profile;
      c.k = PipelineConfig::for_profile(base_profile).k;
    }
    if (seed) c.seed = *seed;
    if (variants) c.variants = *variants;
    if (target_faces) c.target_faces = parse_target_faces(*target_faces);
    if (subdiv) c.subdivision_levels = *subdiv;
    if (strata) c.strata_levels = *strata;
    if (select) c.k = *select;
    if (patch_budget) c.patch_budget = *patch_budget;
    if (augment) c.augment.anisotropic_scale = c.augment.axis_rotation = true;
    if (unweighted) c.distortion_aware = false;
    c.check();
    return c;
  }
};

void print_summary(const ExportManifest& m, const fs::path& out) {
  std::cout << "wrote " << m.entries.size() << " entries to " << (out / "manifest.json").string() << '\n';
  for (const SkipRecord& s : m.skipped) {
    std::cout << "skipped " << s.source;
    if (s.variant >= 0) std::cout << " variant " << s.variant;
    std::cout << ": " << s.error << ": " << s.message << '\n';
    for (const std::string& d : s.diagnostics) std::cout << "  " << d << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh-to-patch preprocessing: simplification, self-parameterization and point features"};
  app.require_subcommand(1);

  PipelineFlags prep_flags, batch_flags;
  std::string mesh_path, labels_path, out_dir = "out";
  auto* prep_cmd = app.add_subcommand("prep", "Process one mesh into a manifest and tensor blobs");
  prep_cmd->add_option("mesh", mesh_path, "Input mesh (.obj or .off)")->required();
  prep_cmd->add_option("-o,--out", out_dir, "Output directory");
  prep_cmd->add_option("--labels", labels_path, "Face label file, one integer per face");
  prep_flags.attach(prep_cmd);

  std::string dir;
  int jobs = 1;
  auto* batch_cmd = app.add_subcommand("batch", "Process every mesh of a directory");
  batch_cmd->add_option("dir", dir, "Directory of .obj/.off meshes with optional <stem>.labels")
      ->required()
      ->check(CLI::ExistingDirectory);
  batch_cmd->add_option("-o,--out", out_dir, "Output directory");
  batch_cmd->add_option("--jobs", jobs, "Parallel mesh-variant jobs")->check(CLI::PositiveNumber);
  batch_flags.attach(batch_cmd);

  std::string manifest_path, entry_key, prefix;
  int bins = 20;
  auto* inspect_cmd = app.add_subcommand("inspect", "Point CSV, uniformity and jacobian histogram of one entry");
  inspect_cmd->add_option("manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
  inspect_cmd->add_option("entry", entry_key, "Entry index or <source>#<variant>")->required();
  inspect_cmd->add_option("-o,--out-prefix", prefix, "Prefix for the CSV files (default: next to the manifest)");
  inspect_cmd->add_option("--bins", bins, "Jacobian histogram bins")->check(CLI::PositiveNumber);

  suite::SuiteConfig suite_cfg;
  std::string report_path;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite on built-in meshes");
  verify_cmd->add_option("--seed", suite_cfg.seed, "Suite seed");
  verify_cmd->add_option("--points", suite_cfg.roundtrip_points, "Round-trip points per mesh");
  verify_cmd->add_flag("--corrupt", suite_cfg.corrupt_traces, "Corrupt one chart per trace (negative control)");
  verify_cmd->add_option("--report", report_path, "Also write the JSON report to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prep_cmd) {
      const PipelineConfig cfg = prep_flags.build();
      std::optional<fs::path> labels;
      if (!labels_path.empty()) labels = labels_path;
      print_summary(prep(mesh_path, cfg, out_dir, labels), out_dir);
    } else if (*batch_cmd) {
      const PipelineConfig cfg = batch_flags.build();
      print_summary(batch(dir, cfg, out_dir, jobs), out_dir);
    } else if (*inspect_cmd) {
      const ExportManifest m = read_manifest(manifest_path);
      const fs::path mdir = fs::path(manifest_path).parent_path();
      const ManifestEntry& e = find_entry(m, entry_key);
      const fs::path out_prefix =
          prefix.empty() ? mdir / (e.blob.substr(0, e.blob.size() - 4)) : fs::path(prefix);
      const InspectReport rep = inspect(m, mdir, e, out_prefix, bins);
      std::cout << "entry " << e.source << " variant " << e.variant << ": " << e.coarse_faces << " coarse faces, "
                << e.real_patches << " real patches, k=" << e.k << '\n'
                << "points " << rep.points << " -> " << out_prefix.string() << "_points.csv\n"
                << "uniformity chi2 " << rep.uniformity.chi2 << " over " << rep.uniformity.bins << " bins (dof "
                << rep.uniformity.dof() << ")\n"
                << "jacobian range [" << rep.jacobian_min << ", " << rep.jacobian_max << "] -> "
                << out_prefix.string() << "_jacobian.csv\n";
      for (const HistogramBin& b : rep.jacobian_histogram)
        std::cout << "  [" << b.lo << ", " << b.hi << "] " << b.count << '\n';
    } else if (*verify_cmd) {
      const auto results = suite::run_suite(suite_cfg);
      const nlohmann::json report = suite::to_json(results);
      std::cout << report.dump(2) << '\n';
      if (!report_path.empty()) std::ofstream(report_path) << report.dump(2) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
