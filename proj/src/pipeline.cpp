#include "meshpatch/pipeline.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace meshpatch {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TaskProfile profile) {
  return profile == TaskProfile::Classification ? "cls" : "seg";
}

TaskProfile profile_from_string(std::string_view name) {
  if (name == "cls" || name == "classification") return TaskProfile::Classification;
  if (name == "seg" || name == "segmentation") return TaskProfile::Segmentation;
  throw Error(ErrorCode::InvalidArgument, "unknown profile '" + std::string(name) + "' (expected cls or seg)");
}

TargetFaces parse_target_faces(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    int v = 0;
    std::istringstream in{std::string(s)};
    if (!(in >> v) || !in.eof())
      throw Error(ErrorCode::InvalidArgument, "bad target face count '" + std::string(text) + "'");
    return v;
  };
  const auto colon = text.find(':');
  TargetFaces t;
  if (colon == std::string_view::npos) {
    t.min = t.max = parse_int(text);
  } else {
    t = {parse_int(text.substr(0, colon)), parse_int(text.substr(colon + 1))};
  }
  if (t.min < 4 || t.max < t.min)
    throw Error(ErrorCode::InvalidArgument, "target face range '" + std::string(text) + "' is empty or below 4");
  return t;
}

PipelineConfig PipelineConfig::for_profile(TaskProfile profile) {
  PipelineConfig c;
  c.profile = profile;
  c.k = profile == TaskProfile::Classification ? 1 : 16;
  return c;
}

void PipelineConfig::check() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (target_faces.min < 4 || target_faces.max < target_faces.min)
    fail("target faces must satisfy 4 <= min <= max");
  if (subdivision_levels < 0 || subdivision_levels > 8) fail("subdivision levels must lie in [0, 8]");
  if (strata_levels < 0 || strata_levels > 8) fail("strata levels must lie in [0, 8]");
  if (k < 1 || k > (1 << (2 * strata_levels))) fail("k must lie in [1, 4^strata]");
  if (variants < 1) fail("variants must be positive");
  if (patch_budget < 0) fail("patch budget must be non-negative");
  if (!(augment.scale_sigma > 0.0)) fail("augmentation sigma must be positive");
}

json to_json(const PipelineConfig& c) {
  return json{{"target_faces", {c.target_faces.min, c.target_faces.max}},
              {"subdivision_levels", c.subdivision_levels},
              {"strata_levels", c.strata_levels},
              {"k", c.k},
              {"variants", c.variants},
              {"patch_budget", c.patch_budget},
              {"seed", c.seed},
              {"profile", std::string(to_string(c.profile))},
              {"distortion_aware", c.distortion_aware},
              {"augment",
               {{"anisotropic_scale", c.augment.anisotropic_scale},
                {"scale_sigma", c.augment.scale_sigma},
                {"truncation", c.augment.truncation},
                {"axis_rotation", c.augment.axis_rotation}}}};
}

PipelineConfig config_from_json(const json& j, PipelineConfig base) {
  try {
    if (j.contains("profile")) {
      base.profile = profile_from_string(j.at("profile").get<std::string>());
      if (!j.contains("k")) base.k = PipelineConfig::for_profile(base.profile).k;
    }
    if (j.contains("target_faces")) {
      const json& t = j.at("target_faces");
      if (t.is_number_integer()) base.target_faces = {t.get<int>(), t.get<int>()};
      else if (t.is_string()) base.target_faces = parse_target_faces(t.get<std::string>());
      else base.target_faces = {t.at(0).get<int>(), t.at(1).get<int>()};
    }
    auto take = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("subdivision_levels", base.subdivision_levels);
    take("strata_levels", base.strata_levels);
    take("k", base.k);
    take("variants", base.variants);
    take("patch_budget", base.patch_budget);
    take("seed", base.seed);
    take("distortion_aware", base.distortion_aware);
    if (j.contains("augment")) {
      const json& a = j.at("augment");
      if (a.contains("anisotropic_scale")) base.augment.anisotropic_scale = a.at("anisotropic_scale").get<bool>();
      if (a.contains("scale_sigma")) base.augment.scale_sigma = a.at("scale_sigma").get<double>();
      if (a.contains("truncation")) base.augment.truncation = a.at("truncation").get<double>();
      if (a.contains("axis_rotation")) base.augment.axis_rotation = a.at("axis_rotation").get<bool>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  return base;
}

const TensorRecord* ManifestEntry::tensor(std::string_view name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

json to_json(const ExportManifest& m) {
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    json tensors = json::array();
    for (const TensorRecord& t : e.tensors)
      tensors.push_back({{"name", t.name}, {"dtype", "float32"}, {"shape", t.shape},
                         {"offset", t.offset}, {"length", t.length}});
    entries.push_back({{"source", e.source},
                       {"variant", e.variant},
                       {"seed", e.seed},
                       {"original_faces", e.original_faces},
                       {"target_faces", e.target_faces},
                       {"coarse_faces", e.coarse_faces},
                       {"real_patches", e.real_patches},
                       {"patch_budget", e.patch_budget},
                       {"k", e.k},
                       {"subdivision_levels", e.subdivision_levels},
                       {"strata_levels", e.strata_levels},
                       {"augmented", e.augmented},
                       {"blob", e.blob},
                       {"crc32", e.crc32},
                       {"tensors", tensors},
                       {"rejections",
                        {{"link_condition", e.rejections.link_condition},
                         {"non_manifold", e.rejections.non_manifold},
                         {"normal_flip", e.rejections.normal_flip},
                         {"foldover", e.rejections.foldover}}}});
  }
  json skipped = json::array();
  for (const SkipRecord& s : m.skipped)
    skipped.push_back({{"source", s.source}, {"variant", s.variant}, {"error", s.error},
                       {"message", s.message}, {"diagnostics", s.diagnostics}});
  return json{{"version", m.version}, {"config", to_json(m.config)}, {"entries", entries}, {"skipped", skipped}};
}

ExportManifest manifest_from_json(const json& j) {
  ExportManifest m;
  try {
    m.version = j.at("version").get<int>();
    m.config = config_from_json(j.at("config"), PipelineConfig{});
    for (const json& je : j.at("entries")) {
      ManifestEntry e;
      e.source = je.at("source").get<std::string>();
      e.variant = je.at("variant").get<int>();
      e.seed = je.at("seed").get<std::uint64_t>();
      e.original_faces = je.at("original_faces").get<int>();
      e.target_faces = je.at("target_faces").get<int>();
      e.coarse_faces = je.at("coarse_faces").get<int>();
      e.real_patches = je.at("real_patches").get<int>();
      e.patch_budget = je.at("patch_budget").get<int>();
      e.k = je.at("k").get<int>();
      e.subdivision_levels = je.at("subdivision_levels").get<int>();
      e.strata_levels = je.at("strata_levels").get<int>();
      e.augmented = je.at("augmented").get<bool>();
      e.blob = je.at("blob").get<std::string>();
      e.crc32 = je.at("crc32").get<std::uint32_t>();
      for (const json& jt : je.at("tensors"))
        e.tensors.push_back({jt.at("name").get<std::string>(), jt.at("shape").get<std::vector<std::int64_t>>(),
                             jt.at("offset").get<std::uint64_t>(), jt.at("length").get<std::uint64_t>()});
      const json& r = je.at("rejections");
      e.rejections = {r.at("link_condition").get<int>(), r.at("non_manifold").get<int>(),
                      r.at("normal_flip").get<int>(), r.at("foldover").get<int>()};
      m.entries.push_back(std::move(e));
    }
    for (const json& js : j.at("skipped"))
      m.skipped.push_back({js.at("source").get<std::string>(), js.at("variant").get<int>(),
                           js.at("error").get<std::string>(), js.at("message").get<std::string>(),
                           js.at("diagnostics").get<std::vector<std::string>>()});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("manifest: ") + e.what());
  }
  return m;
}

ExportManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

std::uint64_t variant_seed(std::uint64_t seed, const std::string& file_name, int variant) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : file_name) h = (h ^ c) * 1099511628211ULL;
  return mix_seed(mix_seed(seed, h), static_cast<std::uint64_t>(variant));
}

IndexedMesh prepare_original(const IndexedMesh& mesh, const PipelineConfig& config, std::uint64_t seed) {
  IndexedMesh out = normalize_unit_box(mesh).mesh;
  if (config.augment.anisotropic_scale || config.augment.axis_rotation) {
    Rng rng(mix_seed(seed, 2));
    out = augment(out, config.augment, rng).mesh;
  }
  return out;
}

int draw_target_faces(const TargetFaces& range, int mesh_faces, std::uint64_t seed) {
  const int hi = std::min(range.max, mesh_faces);
  if (hi < range.min)
    throw Error(ErrorCode::TargetUnreachable, "mesh has " + std::to_string(mesh_faces) +
                                                  " faces, fewer than the minimum target " +
                                                  std::to_string(range.min));
  int t = range.min;
  if (hi > range.min) {
    Rng rng(mix_seed(seed, 3));
    t = static_cast<int>(rng.uniform_int(range.min, hi));
  }
  // Each collapse removes two faces.
  if ((mesh_faces - t) % 2 != 0) t += t + 1 <= hi ? 1 : -1;
  return t;
}

VariantResult run_variant(const IndexedMesh& mesh, const std::optional<std::vector<int>>& face_labels,
                          const PipelineConfig& config, std::uint64_t seed) {
  const MeshDiagnostics diag = validate(mesh);
  if (!diag.is_manifold || !diag.is_watertight)
    throw Error(ErrorCode::NonManifoldInput, "input is not a watertight 2-manifold");
  if (face_labels && static_cast<int>(face_labels->size()) != mesh.num_faces())
    throw Error(ErrorCode::MissingLabel, "label count " + std::to_string(face_labels->size()) +
                                             " differs from face count " + std::to_string(mesh.num_faces()));

  VariantResult r;
  r.original = prepare_original(mesh, config, seed);
  r.target_faces = draw_target_faces(config.target_faces, mesh.num_faces(), seed);
  r.trace = simplify_to(r.original, r.target_faces, mix_seed(seed, 1));
  r.topology = subdivide(r.trace.coarse, config.subdivision_levels);
  r.layout = build_patch_layout(r.topology, config.patch_budget);

  SelectionConfig sel;
  sel.strata_levels = config.strata_levels;
  sel.k = config.k;
  sel.seed = mix_seed(seed, 4);
  sel.distortion_aware = config.distortion_aware;
  r.features = sample_mesh_features(r.trace, r.topology, sel);
  r.tensor = pack_patches(r.features, r.layout);

  if (face_labels) {
    r.unit_labels = labels_to_units(*face_labels, r.features);
    r.face_labels_from_units = units_to_faces(*r.unit_labels, r.trace, r.topology);
  }
  return r;
}

namespace {

void append_floats(std::vector<char>& blob, std::span<const float> values) {
  for (float v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) blob.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
  }
}

std::uint32_t checksum(std::span<const char> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

// Per-unit values of the real patches, in patch-slot order.
template <typename F>
std::vector<float> per_real_unit(const VariantResult& r, int per_unit, F value) {
  std::vector<float> out;
  const int upp = r.layout.units_per_patch;
  out.reserve(static_cast<std::size_t>(r.layout.real_patches) * upp * per_unit);
  for (int p = 0; p < r.layout.real_patches; ++p)
    for (int slot = 0; slot < upp; ++slot) {
      const int global = r.layout.patch_to_face[p] * upp + r.layout.unit_order[slot];
      for (int i = 0; i < per_unit; ++i) out.push_back(value(global, i));
    }
  return out;
}

}  // namespace

std::vector<char> encode_blob(const VariantResult& r, std::vector<TensorRecord>& records) {
  std::vector<char> blob;
  records.clear();
  auto add = [&](const char* name, std::vector<std::int64_t> shape, std::span<const float> values) {
    TensorRecord t{name, std::move(shape), blob.size(), values.size() * sizeof(float)};
    append_floats(blob, values);
    records.push_back(std::move(t));
  };
  const PatchTensor& t = r.tensor;
  const std::int64_t real_units = static_cast<std::int64_t>(r.layout.real_patches) * r.layout.units_per_patch;
  add(tensor_names::kFeatures, {t.patches, t.row_length()}, t.data);
  add(tensor_names::kAvgPosition, {t.patches, 3}, t.avg_position);
  std::vector<float> mask(t.mask.begin(), t.mask.end());
  add(tensor_names::kMask, {t.patches}, mask);
  add(tensor_names::kJacobian, {real_units, t.k},
      per_real_unit(r, t.k, [&](int g, int i) { return static_cast<float>(r.features.unit(g)[i].jacobian); }));
  add(tensor_names::kSourceFace, {real_units, t.k},
      per_real_unit(r, t.k, [&](int g, int i) { return static_cast<float>(r.features.unit(g)[i].source.face); }));
  if (r.unit_labels) {
    add(tensor_names::kUnitLabels, {real_units},
        per_real_unit(r, 1, [&](int g, int) { return static_cast<float>((*r.unit_labels)[g]); }));
    std::vector<float> faces(r.face_labels_from_units->begin(), r.face_labels_from_units->end());
    add(tensor_names::kFaceLabels, {static_cast<std::int64_t>(faces.size())}, faces);
  }
  return blob;
}

std::vector<float> read_tensor(const fs::path& manifest_dir, const ManifestEntry& entry, std::string_view name) {
  const TensorRecord* rec = entry.tensor(name);
  if (!rec) throw Error(ErrorCode::EntryNotFound, "entry has no tensor '" + std::string(name) + "'");
  const fs::path path = manifest_dir / entry.blob;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<char> blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (checksum(blob) != entry.crc32) throw Error(ErrorCode::IoError, "checksum mismatch in " + path.string());
  if (rec->offset + rec->length > blob.size() || rec->length % 4 != 0)
    throw Error(ErrorCode::IoError, "tensor '" + std::string(name) + "' lies outside " + path.string());
  std::vector<float> out(rec->length / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[rec->offset + 4 * i + b])) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

std::vector<int> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<int> labels;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      labels.push_back(std::stoi(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, path.string() + ": bad label '" + token + "'");
    }
  }
  return labels;
}

namespace {

struct LoadedInput {
  IndexedMesh mesh;
  std::optional<std::vector<int>> labels;
};

std::vector<std::string> describe_defects(const IndexedMesh& mesh) {
  const MeshDiagnostics d = validate(mesh);
  std::vector<std::string> out;
  out.push_back("manifold=" + std::string(d.is_manifold ? "true" : "false") +
                " watertight=" + std::string(d.is_watertight ? "true" : "false") +
                " defects=" + std::to_string(d.defects.size()));
  constexpr std::size_t kShown = 10;
  for (std::size_t i = 0; i < std::min(kShown, d.defects.size()); ++i) {
    const Defect& x = d.defects[i];
    out.push_back(std::string(to_string(x.kind)) + " " + std::to_string(x.a) +
                  (x.b >= 0 ? " " + std::to_string(x.b) : std::string()));
  }
  return out;
}

struct JobOutcome {
  std::optional<ManifestEntry> entry;
  std::optional<SkipRecord> skip;
};

JobOutcome run_job(const MeshInput& input, const LoadedInput& loaded, const PipelineConfig& config, int variant,
                   const fs::path& out_dir) {
  const std::string file_name = input.path.filename().string();
  const std::uint64_t seed = variant_seed(config.seed, file_name, variant);
  JobOutcome outcome;
  try {
    const VariantResult r = run_variant(loaded.mesh, loaded.labels, config, seed);
    ManifestEntry e;
    e.source = input.path.string();
    e.variant = variant;
    e.seed = seed;
    e.original_faces = loaded.mesh.num_faces();
    e.target_faces = r.target_faces;
    e.coarse_faces = r.trace.coarse.num_faces();
    e.real_patches = r.layout.real_patches;
    e.patch_budget = r.layout.patch_count;
    e.k = config.k;
    e.subdivision_levels = config.subdivision_levels;
    e.strata_levels = config.strata_levels;
    e.augmented = config.augment.anisotropic_scale || config.augment.axis_rotation;
    e.rejections = r.trace.rejections;
    e.blob = file_name + "__v" + std::to_string(variant) + ".bin";
    const std::vector<char> blob = encode_blob(r, e.tensors);
    e.crc32 = checksum(blob);
    std::ofstream out(out_dir / e.blob, std::ios::binary);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (out_dir / e.blob).string());
    outcome.entry = std::move(e);
  } catch (const Error& err) {
    SkipRecord s{input.path.string(), variant, std::string(to_string(err.code())), err.what(), {}};
    if (err.code() == ErrorCode::NonManifoldInput) s.diagnostics = describe_defects(loaded.mesh);
    outcome.skip = std::move(s);
  }
  return outcome;
}

}  // namespace

ExportManifest export_dataset(const std::vector<MeshInput>& inputs, const PipelineConfig& config,
                              const fs::path& out_dir, int jobs) {
  config.check();
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be positive");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  const int n = static_cast<int>(inputs.size());
  std::vector<std::optional<LoadedInput>> loaded(n);
  std::vector<std::optional<SkipRecord>> load_errors(n);
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      LoadedInput& li = loaded[i].emplace();
      li.mesh = load_mesh_file(inputs[i].path.string());
      if (inputs[i].labels) li.labels = read_labels(*inputs[i].labels);
    } catch (const Error& err) {
      loaded[i].reset();
      load_errors[i] = SkipRecord{inputs[i].path.string(), -1, std::string(to_string(err.code())), err.what(), {}};
    }
  }

  const int variants = config.variants;
  std::vector<JobOutcome> outcomes(static_cast<std::size_t>(n) * variants);
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1)
  for (int job = 0; job < n * variants; ++job) {
    const int i = job / variants;
    if (loaded[i]) outcomes[job] = run_job(inputs[i], *loaded[i], config, job % variants, out_dir);
  }

  ExportManifest manifest;
  manifest.config = config;
  for (int i = 0; i < n; ++i) {
    if (load_errors[i]) manifest.skipped.push_back(*load_errors[i]);
    for (int v = 0; v < variants; ++v) {
      JobOutcome& o = outcomes[static_cast<std::size_t>(i) * variants + v];
      if (o.entry) manifest.entries.push_back(std::move(*o.entry));
      if (o.skip) manifest.skipped.push_back(std::move(*o.skip));
    }
  }
  std::ofstream out(out_dir / "manifest.json");
  out << to_json(manifest).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest in " + out_dir.string());
  return manifest;
}

ExportManifest prep(const fs::path& mesh_path, const PipelineConfig& config, const fs::path& out_dir,
                    const std::optional<fs::path>& labels) {
  return export_dataset({MeshInput{mesh_path, labels}}, config, out_dir, 1);
}

std::vector<MeshInput> collect_inputs(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<MeshInput> inputs;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    std::string ext = item.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".obj" && ext != ".off") continue;
    MeshInput in{item.path(), std::nullopt};
    fs::path sidecar = item.path();
    sidecar.replace_extension(".labels");
    if (fs::exists(sidecar)) in.labels = sidecar;
    inputs.push_back(std::move(in));
  }
  std::sort(inputs.begin(), inputs.end(),
            [](const MeshInput& a, const MeshInput& b) { return a.path.filename() < b.path.filename(); });
  return inputs;
}

ExportManifest batch(const fs::path& dir, const PipelineConfig& config, const fs::path& out_dir, int jobs) {
  return export_dataset(collect_inputs(dir), config, out_dir, jobs);
}

const ManifestEntry& find_entry(const ExportManifest& manifest, std::string_view key) {
  const auto hash = key.rfind('#');
  if (hash != std::string_view::npos) {
    const std::string source(key.substr(0, hash));
    const std::string variant(key.substr(hash + 1));
    for (const ManifestEntry& e : manifest.entries)
      if ((e.source == source || fs::path(e.source).filename() == source) && std::to_string(e.variant) == variant)
        return e;
  } else {
    std::size_t index = 0;
    std::istringstream in{std::string(key)};
    if (in >> index && in.eof() && index < manifest.entries.size()) return manifest.entries[index];
  }
  throw Error(ErrorCode::EntryNotFound, "no manifest entry '" + std::string(key) + "'");
}

InspectReport inspect(const ExportManifest& manifest, const fs::path& manifest_dir, const ManifestEntry& entry,
                      const fs::path& out_prefix, int histogram_bins) {
  InspectReport rep;
  rep.entry = &entry;
  const std::vector<float> features = read_tensor(manifest_dir, entry, tensor_names::kFeatures);
  const std::vector<float> jac = read_tensor(manifest_dir, entry, tensor_names::kJacobian);
  const std::vector<float> faces = read_tensor(manifest_dir, entry, tensor_names::kSourceFace);

  const TensorRecord& ft = *entry.tensor(tensor_names::kFeatures);
  const std::size_t row = static_cast<std::size_t>(ft.shape.at(1));
  const int per_patch = static_cast<int>(row / kChannels);
  {
    std::ofstream csv(out_prefix.string() + "_points.csv");
    csv << "patch,slot,point,x,y,z,nx,ny,nz\n";
    csv.precision(9);
    for (int p = 0; p < entry.real_patches; ++p)
      for (int j = 0; j < per_patch; ++j) {
        const float* c = features.data() + p * row + static_cast<std::size_t>(j) * kChannels;
        csv << p << ',' << j / entry.k << ',' << j % entry.k;
        for (int ch = 0; ch < kChannels; ++ch) csv << ',' << c[ch];
        csv << '\n';
        ++rep.points;
      }
    if (!csv) throw Error(ErrorCode::IoError, "cannot write " + out_prefix.string() + "_points.csv");
  }

  rep.jacobian_min = *std::min_element(jac.begin(), jac.end());
  rep.jacobian_max = *std::max_element(jac.begin(), jac.end());
  const double span = rep.jacobian_max - rep.jacobian_min;
  const int bins = span > 1e-12 ? std::max(1, histogram_bins) : 1;
  for (int b = 0; b < bins; ++b)
    rep.jacobian_histogram.push_back({rep.jacobian_min + span * b / bins, rep.jacobian_min + span * (b + 1) / bins, 0});
  for (float v : jac) {
    const int b = span > 1e-12 ? std::min(bins - 1, static_cast<int>((v - rep.jacobian_min) / span * bins)) : 0;
    ++rep.jacobian_histogram[b].count;
  }
  {
    std::ofstream csv(out_prefix.string() + "_jacobian.csv");
    csv << "lo,hi,count\n";
    csv.precision(9);
    for (const HistogramBin& b : rep.jacobian_histogram) csv << b.lo << ',' << b.hi << ',' << b.count << '\n';
  }

  const IndexedMesh original = prepare_original(load_mesh_file(entry.source), manifest.config, entry.seed);
  std::vector<SurfacePoint> points;
  points.reserve(faces.size());
  for (float f : faces) points.push_back({static_cast<int>(f), Bary(1.0 / 3, 1.0 / 3, 1.0 / 3)});
  rep.uniformity = verify::uniformity_chi2(points, original);
  return rep;
}

}  // namespace meshpatch
