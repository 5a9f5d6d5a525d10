#pragma once

#include "meshpatch/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace meshpatch::suite {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  int roundtrip_points = 1000;
  bool corrupt_traces = false;  // negative control for the round-trip check
  std::filesystem::path scratch_dir;  // batch determinism writes here; empty means a temp dir
};

/// A built-in mesh normalized to the unit box and simplified into the
/// [96, 256] face range.
struct SimplifiedMesh {
  std::string name;
  SimplificationTrace trace;
};

std::vector<SimplifiedMesh> simplify_suite(std::uint64_t seed);

CheckResult check_roundtrip(const SuiteConfig& cfg);
CheckResult check_voronoi_partition(const SuiteConfig& cfg);
CheckResult check_combinatorics(const SuiteConfig& cfg);
CheckResult check_identity_jacobian(const SuiteConfig& cfg);
CheckResult check_uniformity(const SuiteConfig& cfg);
CheckResult check_qem_optimality(const SuiteConfig& cfg);
CheckResult check_label_roundtrip(const SuiteConfig& cfg);
CheckResult check_batch_determinism(const SuiteConfig& cfg);
CheckResult check_simplification_guards(const SuiteConfig& cfg);

/// All nine checks in order. A check that throws is reported as failed.
std::vector<CheckResult> run_suite(const SuiteConfig& cfg);

nlohmann::json to_json(const std::vector<CheckResult>& results);

}  // namespace meshpatch::suite
