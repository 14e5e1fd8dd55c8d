#include "net2rdm/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "net2rdm/error.hpp"
#include "net2rdm/npy.hpp"

namespace net2rdm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void manifest_error(const fs::path& path, const std::string& what) {
  fail(ErrorCode::ManifestError, path.string() + ": " + what);
}

json parse_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    manifest_error(path, std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const fs::path& path) {
  if (!j.is_object() || !j.contains(key)) manifest_error(path, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    manifest_error(path, std::string("field '") + key + "' has the wrong type");
  }
}

void check_version(const json& j, const fs::path& path) {
  const auto v = field<std::string>(j, "format_version", path);
  if (v != kFormatVersion) manifest_error(path, "unsupported format_version '" + v + "'");
}

std::vector<FileEntry> file_entries(const json& j, const char* key, const char* name_key, const fs::path& path) {
  const auto arr = field<json>(j, key, path);
  if (!arr.is_array()) manifest_error(path, std::string("field '") + key + "' must be an array");
  std::vector<FileEntry> out;
  for (const auto& e : arr) {
    out.push_back({field<std::string>(e, name_key, path), field<std::string>(e, "file", path)});
  }
  return out;
}

json entries_json(const std::vector<FileEntry>& entries, const char* name_key) {
  json arr = json::array();
  for (const auto& e : entries) arr.push_back({{name_key, e.name}, {"file", e.file}});
  return arr;
}

NpyArray read_npy_from(const fs::path& manifest, const std::string& file) {
  const fs::path p = manifest.parent_path() / file;
  if (!fs::exists(p)) fail(ErrorCode::IoError, manifest.string() + ": referenced file '" + p.string() + "' does not exist");
  return read_npy(p);
}

}  // namespace

fs::path resolve_manifest(const fs::path& path, const char* default_name) {
  if (fs::is_directory(path)) return path / default_name;
  return path;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

ActivationManifest read_activation_manifest(const fs::path& path) {
  const json j = parse_json_file(path);
  check_version(j, path);
  ActivationManifest m;
  m.network_id = field<std::string>(j, "network_id", path);
  m.layers = file_entries(j, "layers", "name", path);
  m.stimulus_ids = field<std::vector<std::string>>(j, "stimulus_ids", path);
  return m;
}

RdmManifest read_rdm_manifest(const fs::path& path) {
  const json j = parse_json_file(path);
  check_version(j, path);
  RdmManifest m;
  m.network_id = field<std::string>(j, "network_id", path);
  m.metric = field<std::string>(j, "metric", path);
  m.condition_ids = field<std::vector<std::string>>(j, "condition_ids", path);
  m.layers = file_entries(j, "layers", "name", path);
  return m;
}

BrainManifest read_brain_manifest(const fs::path& path) {
  const json j = parse_json_file(path);
  check_version(j, path);
  BrainManifest m;
  const auto kind = field<std::string>(j, "kind", path);
  if (kind == "rdm") {
    m.kind = BrainKind::rdm;
  } else if (kind == "voxel") {
    m.kind = BrainKind::voxel;
  } else {
    manifest_error(path, "kind must be \"rdm\" or \"voxel\", got \"" + kind + "\"");
  }
  m.roi_name = field<std::string>(j, "roi_name", path);
  m.condition_ids = field<std::vector<std::string>>(j, "condition_ids", path);
  m.subjects = file_entries(j, "subjects", "id", path);
  if (j.contains("coordinates") && !j.at("coordinates").is_null()) {
    m.coordinates = field<std::string>(j, "coordinates", path);
  }
  if (m.kind == BrainKind::voxel && !m.coordinates) manifest_error(path, "voxel manifests need a coordinates file");
  return m;
}

std::string to_json_text(const ActivationManifest& m) {
  const json j = {{"format_version", kFormatVersion},
                  {"network_id", m.network_id},
                  {"layers", entries_json(m.layers, "name")},
                  {"stimulus_ids", m.stimulus_ids}};
  return j.dump(2) + "\n";
}

std::string to_json_text(const RdmManifest& m) {
  const json j = {{"format_version", kFormatVersion},
                  {"network_id", m.network_id},
                  {"metric", m.metric},
                  {"condition_ids", m.condition_ids},
                  {"layers", entries_json(m.layers, "name")}};
  return j.dump(2) + "\n";
}

std::string to_json_text(const BrainManifest& m) {
  json j = {{"format_version", kFormatVersion},
            {"kind", m.kind == BrainKind::rdm ? "rdm" : "voxel"},
            {"roi_name", m.roi_name},
            {"condition_ids", m.condition_ids},
            {"subjects", entries_json(m.subjects, "id")}};
  if (m.coordinates) j["coordinates"] = *m.coordinates;
  return j.dump(2) + "\n";
}

ActivationSet load_activation_set(const fs::path& manifest_path) {
  const fs::path path = resolve_manifest(manifest_path, kActivationManifestName);
  const auto m = read_activation_manifest(path);
  RawActivationSet raw;
  raw.network_id = m.network_id;
  raw.stimulus_ids = m.stimulus_ids;
  for (const auto& entry : m.layers) {
    const auto arr = read_npy_from(path, entry.file);
    raw.layers.push_back({entry.name, npy_as_matrix(arr)});
  }
  try {
    return validate_activation_set(std::move(raw));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Matrix repair_rdm_matrix(Matrix values, const std::string& what) {
  const std::size_t n = values.rows();
  if (values.cols() != n) fail(ErrorCode::ShapeMismatch, what + ": RDM must be square");
  double scale = 0.0;
  for (double v : values.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, what + ": non-finite RDM value");
    scale = std::max(scale, std::abs(v));
  }
  const double tol = 1e-8 * scale;
  for (std::size_t i = 0; i < n; ++i) {
    if (values(i, i) != 0.0) {
      if (std::abs(values(i, i)) > 1e-8) {
        fail(ErrorCode::NonzeroDiagonal, what + ": diagonal entry " + std::to_string(i) + " is not zero");
      }
      values(i, i) = 0.0;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = values(i, j);
      const double b = values(j, i);
      if (a == b) continue;
      if (std::abs(a - b) > tol) {
        fail(ErrorCode::AsymmetricRdm, what + ": entries (" + std::to_string(i) + ", " + std::to_string(j) +
                                           ") and (" + std::to_string(j) + ", " + std::to_string(i) +
                                           ") differ beyond tolerance");
      }
      const double avg = 0.5 * (a + b);
      values(i, j) = avg;
      values(j, i) = avg;
    }
  }
  return values;
}

std::variant<SubjectRdmStack, VoxelDataset> load_brain_data(const fs::path& manifest_path) {
  const fs::path path = resolve_manifest(manifest_path, kBrainManifestName);
  const auto m = read_brain_manifest(path);
  if (m.subjects.empty()) manifest_error(path, "no subjects listed");
  std::vector<std::string> subject_ids;
  for (const auto& s : m.subjects) subject_ids.push_back(s.name);
  try {
    if (m.kind == BrainKind::rdm) {
      std::vector<Rdm> rdms;
      for (const auto& s : m.subjects) {
        const auto arr = read_npy_from(path, s.file);
        if (arr.shape.size() != 2 || arr.shape[0] != arr.shape[1] || arr.shape[0] != m.condition_ids.size()) {
          fail(ErrorCode::ShapeMismatch, "subject '" + s.name + "': expected a " +
                                             std::to_string(m.condition_ids.size()) + "x" +
                                             std::to_string(m.condition_ids.size()) + " RDM");
        }
        rdms.push_back(Rdm::create(m.condition_ids, repair_rdm_matrix(npy_as_matrix(arr), "subject '" + s.name + "'")));
      }
      return SubjectRdmStack::create(m.roi_name, subject_ids, std::move(rdms));
    }
    std::vector<Matrix> responses;
    for (const auto& s : m.subjects) {
      const auto arr = read_npy_from(path, s.file);
      if (arr.shape.size() != 2) {
        fail(ErrorCode::ShapeMismatch, "subject '" + s.name + "': voxel responses must be 2-D [conditions x voxels]");
      }
      responses.push_back(npy_as_matrix(arr));
    }
    const auto coords = read_npy_from(path, *m.coordinates);
    if (coords.shape.size() != 2 || coords.shape[1] != 3) {
      fail(ErrorCode::ShapeMismatch, "coordinates must be [n_voxels x 3]");
    }
    return VoxelDataset::create(subject_ids, std::move(responses), npy_as_matrix(coords), m.condition_ids);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ManifestError || e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

ModelRdms load_model_rdms(const fs::path& manifest_path) {
  const fs::path path = resolve_manifest(manifest_path, kRdmManifestName);
  const auto m = read_rdm_manifest(path);
  ModelRdms model;
  model.model_id = m.network_id;
  std::set<std::string> names;
  for (const auto& entry : m.layers) {
    if (!names.insert(entry.name).second) {
      fail(ErrorCode::DuplicateLayerName, path.string() + ": duplicate layer name '" + entry.name + "'");
    }
    const auto arr = read_npy_from(path, entry.file);
    if (arr.shape.size() != 2) fail(ErrorCode::ShapeMismatch, path.string() + ": layer '" + entry.name + "' is not 2-D");
    try {
      model.layers.push_back(
          {entry.name, Rdm::create(m.condition_ids, repair_rdm_matrix(npy_as_matrix(arr), "layer '" + entry.name + "'"))});
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
  }
  if (model.layers.empty()) manifest_error(path, "no layers listed");
  return model;
}

std::string file_stem_for(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "layer";
  return out;
}

}  // namespace net2rdm
