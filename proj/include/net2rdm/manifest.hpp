#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "net2rdm/core_model.hpp"
#include "net2rdm/rdm.hpp"
#include "net2rdm/rsa.hpp"

namespace net2rdm {

inline constexpr const char* kActivationManifestName = "net2rdm-activations.json";
inline constexpr const char* kBrainManifestName = "net2rdm-brain.json";
inline constexpr const char* kRdmManifestName = "net2rdm-rdms.json";
inline constexpr const char* kFormatVersion = "1";

struct FileEntry {
  std::string name;  // layer name or subject id
  std::string file;  // relative to the manifest directory
  bool operator==(const FileEntry&) const = default;
};

struct ActivationManifest {
  std::string network_id;
  std::vector<FileEntry> layers;
  std::vector<std::string> stimulus_ids;
  bool operator==(const ActivationManifest&) const = default;
};

struct RdmManifest {
  std::string network_id;
  std::string metric;
  std::vector<std::string> condition_ids;
  std::vector<FileEntry> layers;
  bool operator==(const RdmManifest&) const = default;
};

enum class BrainKind { rdm, voxel };

struct BrainManifest {
  BrainKind kind = BrainKind::rdm;
  std::string roi_name;
  std::vector<std::string> condition_ids;
  std::vector<FileEntry> subjects;
  std::optional<std::string> coordinates;  // voxel kind only
  bool operator==(const BrainManifest&) const = default;
};

/// A directory argument resolves to `dir / default_name`.
std::filesystem::path resolve_manifest(const std::filesystem::path& path, const char* default_name);

ActivationManifest read_activation_manifest(const std::filesystem::path& path);
RdmManifest read_rdm_manifest(const std::filesystem::path& path);
BrainManifest read_brain_manifest(const std::filesystem::path& path);

/// Canonical JSON text (sorted keys, two-space indent, trailing newline).
std::string to_json_text(const ActivationManifest& m);
std::string to_json_text(const RdmManifest& m);
std::string to_json_text(const BrainManifest& m);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Loads every layer file, flattens trailing dims, validates the set.
ActivationSet load_activation_set(const std::filesystem::path& manifest_path);

/// Loads per-subject RDMs or voxel patterns depending on the manifest kind.
std::variant<SubjectRdmStack, VoxelDataset> load_brain_data(const std::filesystem::path& manifest_path);

/// Loads an RDM manifest (as written by `net2rdm rdm`) as one model.
ModelRdms load_model_rdms(const std::filesystem::path& manifest_path);

/// Symmetry repair for RDMs read from disk: asymmetry up to 1e-8 relative to
/// the largest magnitude is averaged away and near-zero diagonals are zeroed;
/// anything larger throws AsymmetricRdm / NonzeroDiagonal.
Matrix repair_rdm_matrix(Matrix values, const std::string& what);

/// File-system safe, unique-within-call stem for a layer name.
std::string file_stem_for(const std::string& name);

}  // namespace net2rdm
