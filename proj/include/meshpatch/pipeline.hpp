#pragma once

#include "meshpatch/features.hpp"
#include "meshpatch/verify.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace meshpatch {

enum class TaskProfile { Classification, Segmentation };

std::string_view to_string(TaskProfile profile);
TaskProfile profile_from_string(std::string_view name);  // "cls" / "seg"

struct TargetFaces {
  int min = 96;
  int max = 256;
  bool fixed() const { return min == max; }
};

/// Parses "N" or "MIN:MAX".
TargetFaces parse_target_faces(std::string_view text);

struct PipelineConfig {
  TargetFaces target_faces;
  int subdivision_levels = 3;
  int strata_levels = 3;
  int k = 1;
  int variants = 10;
  int patch_budget = 256;
  std::uint64_t seed = 0;
  AugmentConfig augment;
  TaskProfile profile = TaskProfile::Classification;
  bool distortion_aware = true;

  /// Defaults for a profile: k = 1 for classification, 16 for segmentation.
  static PipelineConfig for_profile(TaskProfile profile);
  /// Throws InvalidArgument on out-of-range fields.
  void check() const;
};

nlohmann::json to_json(const PipelineConfig& config);
/// Overlays the keys present in `j` onto `base`.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base);

/// Names of the float32 tensors in a blob, in storage order.
namespace tensor_names {
inline constexpr const char* kFeatures = "features";            // P x (units*k*6)
inline constexpr const char* kAvgPosition = "avg_position";     // P x 3
inline constexpr const char* kMask = "mask";                    // P, 1.0 real / 0.0 padding
inline constexpr const char* kJacobian = "jacobian";            // real units x k
inline constexpr const char* kSourceFace = "source_face";       // real units x k, M^L face ids
inline constexpr const char* kUnitLabels = "unit_labels";       // real units
inline constexpr const char* kFaceLabels = "face_labels_from_units";  // M^L faces
}  // namespace tensor_names

struct TensorRecord {
  std::string name;
  std::vector<std::int64_t> shape;
  std::uint64_t offset = 0;  // bytes
  std::uint64_t length = 0;  // bytes
};

struct ManifestEntry {
  std::string source;  // mesh path as given
  int variant = 0;
  std::uint64_t seed = 0;
  int original_faces = 0;
  int target_faces = 0;
  int coarse_faces = 0;
  int real_patches = 0;
  int patch_budget = 0;
  int k = 0;
  int subdivision_levels = 0;
  int strata_levels = 0;
  bool augmented = false;
  std::string blob;  // file name relative to the manifest
  std::uint32_t crc32 = 0;
  std::vector<TensorRecord> tensors;
  RejectionCounters rejections;

  const TensorRecord* tensor(std::string_view name) const;
};

struct SkipRecord {
  std::string source;
  int variant = -1;  // -1 when the file itself could not be used
  std::string error;
  std::string message;
  std::vector<std::string> diagnostics;
};

struct ExportManifest {
  int version = 1;
  PipelineConfig config;
  std::vector<ManifestEntry> entries;
  std::vector<SkipRecord> skipped;
};

nlohmann::json to_json(const ExportManifest& manifest);
ExportManifest manifest_from_json(const nlohmann::json& j);
ExportManifest read_manifest(const std::filesystem::path& path);

/// Seed of one mesh variant, derived from the file name (not its directory).
std::uint64_t variant_seed(std::uint64_t seed, const std::string& file_name, int variant);

/// Everything one mesh variant produces, before serialization.
struct VariantResult {
  IndexedMesh original;  // M^L after normalization and augmentation
  SimplificationTrace trace;
  SubdividedTopology topology;
  PatchLayout layout;
  SampledFeatures features;
  PatchTensor tensor;
  std::optional<std::vector<int>> unit_labels;
  std::optional<std::vector<int>> face_labels_from_units;
  int target_faces = 0;
};

/// Normalized and optionally augmented M^L of a variant; shared by prep and inspect.
IndexedMesh prepare_original(const IndexedMesh& mesh, const PipelineConfig& config, std::uint64_t seed);

/// Target face count for a variant. A range is clipped to the mesh's face count and
/// moved onto the parity reachable by edge collapses.
int draw_target_faces(const TargetFaces& range, int mesh_faces, std::uint64_t seed);

/// Runs one variant end to end. Throws on any pipeline error.
VariantResult run_variant(const IndexedMesh& mesh, const std::optional<std::vector<int>>& face_labels,
                          const PipelineConfig& config, std::uint64_t seed);

/// Serializes a variant's tensors as little-endian float32.
std::vector<char> encode_blob(const VariantResult& result, std::vector<TensorRecord>& records);

/// Reads one tensor of an entry back as floats; verifies the blob checksum.
std::vector<float> read_tensor(const std::filesystem::path& manifest_dir, const ManifestEntry& entry,
                               std::string_view name);

struct MeshInput {
  std::filesystem::path path;
  std::optional<std::filesystem::path> labels;  // sidecar <stem>.labels
};

/// Processes every input x variant; `jobs` threads work on independent
/// variants. The manifest and blobs under `out_dir` depend only on the config
/// and the inputs.
ExportManifest export_dataset(const std::vector<MeshInput>& inputs, const PipelineConfig& config,
                              const std::filesystem::path& out_dir, int jobs = 1);

ExportManifest prep(const std::filesystem::path& mesh_path, const PipelineConfig& config,
                    const std::filesystem::path& out_dir,
                    const std::optional<std::filesystem::path>& labels = std::nullopt);

/// All .obj/.off files of a directory in name order, with label sidecars.
std::vector<MeshInput> collect_inputs(const std::filesystem::path& dir);

ExportManifest batch(const std::filesystem::path& dir, const PipelineConfig& config,
                     const std::filesystem::path& out_dir, int jobs);

/// Reads a label sidecar: one integer per face, whitespace separated.
std::vector<int> read_labels(const std::filesystem::path& path);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

struct InspectReport {
  const ManifestEntry* entry = nullptr;
  int points = 0;
  verify::UniformityReport uniformity;
  std::vector<HistogramBin> jacobian_histogram;
  double jacobian_min = 0.0;
  double jacobian_max = 0.0;
};

/// Finds an entry by index ("3") or by "<source>#<variant>"; throws EntryNotFound.
const ManifestEntry& find_entry(const ExportManifest& manifest, std::string_view key);

/// Writes <prefix>_points.csv and <prefix>_jacobian.csv and returns the stats.
InspectReport inspect(const ExportManifest& manifest, const std::filesystem::path& manifest_dir,
                      const ManifestEntry& entry, const std::filesystem::path& out_prefix,
                      int histogram_bins = 20);

}  // namespace meshpatch
