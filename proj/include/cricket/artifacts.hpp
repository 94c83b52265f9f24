#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace cricket {

enum class ArtifactKind { Model, Coefficients, Transitions, Policy, Distribution, Report };

inline constexpr int kSchemaVersion = 1;

std::string to_string(ArtifactKind kind);
ArtifactKind artifact_kind_from_string(const std::string& text);

struct Provenance {
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::string> corpus_manifest_hash;
};

struct Artifact {
  ArtifactKind kind = ArtifactKind::Model;
  int schema_version = kSchemaVersion;
  Provenance provenance;
  nlohmann::json payload;
};

nlohmann::json to_json(const Artifact& artifact);

/// Envelope {kind, schema_version, provenance, payload}, written atomically.
void save_artifact(const std::filesystem::path& path, const Artifact& artifact);

/// Throws ArtifactError when the file holds another kind or schema version,
/// ParseError when it is not an artifact at all.
Artifact load_artifact(const std::filesystem::path& path, ArtifactKind expected);

}  // namespace cricket
