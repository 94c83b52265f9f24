#include "cricket/artifacts.hpp"

#include <array>

#include "cricket/errors.hpp"
#include "cricket/io.hpp"

namespace cricket {

using nlohmann::json;

namespace {
constexpr std::array<const char*, 6> kKindNames{"model",  "coefficients", "transitions",
                                                "policy", "distribution", "report"};
}

std::string to_string(ArtifactKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ArtifactKind artifact_kind_from_string(const std::string& text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (text == kKindNames[i]) return static_cast<ArtifactKind>(i);
  throw ArtifactError("unknown artifact kind '" + text + "'");
}

json to_json(const Artifact& a) {
  json prov = {{"seed", a.provenance.seed}, {"config", a.provenance.config}};
  prov["corpus_manifest_hash"] =
      a.provenance.corpus_manifest_hash ? json(*a.provenance.corpus_manifest_hash) : json(nullptr);
  return {{"kind", to_string(a.kind)},
          {"schema_version", a.schema_version},
          {"provenance", prov},
          {"payload", a.payload}};
}

void save_artifact(const std::filesystem::path& path, const Artifact& artifact) {
  write_file_atomic(path, to_json(artifact).dump(1) + "\n");
}

Artifact load_artifact(const std::filesystem::path& path, ArtifactKind expected) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    Artifact a;
    a.kind = artifact_kind_from_string(doc.at("kind").get<std::string>());
    if (a.kind != expected)
      throw ArtifactError(path.string() + ": expected a " + to_string(expected) +
                          " artifact, found " + to_string(a.kind));
    a.schema_version = doc.at("schema_version").get<int>();
    if (a.schema_version != kSchemaVersion)
      throw ArtifactError(path.string() + ": schema version " + std::to_string(a.schema_version) +
                          " is not supported (expected " + std::to_string(kSchemaVersion) + ")");
    const auto& prov = doc.at("provenance");
    a.provenance.seed = prov.at("seed").get<std::uint64_t>();
    a.provenance.config = prov.at("config");
    if (!prov.at("corpus_manifest_hash").is_null())
      a.provenance.corpus_manifest_hash = prov.at("corpus_manifest_hash").get<std::string>();
    a.payload = doc.at("payload");
    return a;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace cricket
