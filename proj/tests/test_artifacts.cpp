#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cricket/artifacts.hpp"
#include "cricket/errors.hpp"
#include "cricket/io.hpp"

using namespace cricket;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cricket_artifacts";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("artifacts") {
  TEST_CASE("every kind round-trips") {
    for (auto kind : {ArtifactKind::Model, ArtifactKind::Coefficients, ArtifactKind::Transitions,
                      ArtifactKind::Policy, ArtifactKind::Distribution, ArtifactKind::Report}) {
      CHECK(artifact_kind_from_string(to_string(kind)) == kind);
      Artifact a;
      a.kind = kind;
      a.provenance.seed = 18446744073709551615ULL;
      a.provenance.config = {{"epochs", 3}, {"hidden", {64, 32}}};
      a.provenance.corpus_manifest_hash = "00ff";
      a.payload = {{"value", 0.1}, {"list", {1, 2, 3}}};
      const auto path = scratch(to_string(kind) + ".json");
      save_artifact(path, a);
      const auto back = load_artifact(path, kind);
      CHECK(back.kind == kind);
      CHECK(back.schema_version == kSchemaVersion);
      CHECK(back.provenance.seed == a.provenance.seed);
      CHECK(back.provenance.config == a.provenance.config);
      CHECK(back.provenance.corpus_manifest_hash == a.provenance.corpus_manifest_hash);
      CHECK(back.payload == a.payload);
      CHECK(to_json(back) == to_json(a));
    }
  }

  TEST_CASE("missing manifest hash stays missing") {
    Artifact a;
    a.payload = nlohmann::json::object();
    const auto path = scratch("nohash.json");
    save_artifact(path, a);
    CHECK_FALSE(load_artifact(path, ArtifactKind::Model).provenance.corpus_manifest_hash.has_value());
  }

  TEST_CASE("wrong kind or version") {
    Artifact a;
    a.kind = ArtifactKind::Policy;
    a.payload = 1;
    const auto path = scratch("policy.json");
    save_artifact(path, a);
    CHECK_THROWS_AS(load_artifact(path, ArtifactKind::Model), ArtifactError);

    a.schema_version = 2;
    save_artifact(path, a);
    CHECK_THROWS_AS(load_artifact(path, ArtifactKind::Policy), ArtifactError);

    std::ofstream(scratch("junk.json")) << "{\"payload\": 3}";
    CHECK_THROWS_AS(load_artifact(scratch("junk.json"), ArtifactKind::Model), ParseError);
    CHECK_THROWS_AS(artifact_kind_from_string("weights"), Error);
  }

  TEST_CASE("saving leaves no temporary files") {
    const auto dir = fs::temp_directory_path() / "cricket_artifacts_clean";
    fs::remove_all(dir);
    fs::create_directories(dir);
    Artifact a;
    a.payload = {{"k", "v"}};
    save_artifact(dir / "a.json", a);
    save_artifact(dir / "a.json", a);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    fs::remove_all(dir);
  }
}
