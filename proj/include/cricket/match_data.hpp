#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cricket {

/// One ball of a match. `ball_in_over` counts legal deliveries; a wide or no-ball
/// keeps the index of the delivery that has to be re-bowled.
struct Delivery {
  int innings_no = 1;
  int over = 0;
  int ball_in_over = 0;
  int runs_batted = 0;
  bool is_extra = false;
  bool is_wicket = false;

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

inline constexpr std::string_view kNoResult = "no result";
inline constexpr std::string_view kTie = "tie";

struct Match {
  std::string match_id;
  std::string team_first;
  std::string team_second;
  std::string winner;  // a team name, "tie" or "no result"
  std::vector<Delivery> deliveries;
  std::array<int, 2> final_score{0, 0};
  std::array<int, 2> wickets_lost{0, 0};

  /// Deliveries of one innings (1 or 2), in recorded order.
  std::vector<Delivery> innings(int innings_no) const;
  bool has_innings(int innings_no) const;
  int score(int innings_no) const { return final_score.at(innings_no - 1); }
  bool decided() const { return winner != kNoResult && winner != kTie; }

  friend bool operator==(const Match&, const Match&) = default;
};

struct Corpus {
  std::vector<Match> matches;
  std::string source;
  std::string ingested_at;  // ISO-8601, recorded for provenance only
};

/// Parses one canonical match document. Declared `final_score` / `wickets_lost`
/// on an innings are checked against the deliveries; absent ones are derived.
/// Throws ParseError (with line context) or ValidationError.
Match parse_match(std::string_view text);

/// Canonical serialisation; `parse_match(to_canonical_json(m)) == m`.
nlohmann::json to_canonical_json(const Match& match);

/// Fills final_score / wickets_lost from the deliveries and validates.
void finalize_match(Match& match);

struct AdaptOptions {
  /// Reject matches whose result was decided by the DLS method.
  bool exclude_dls_decided = false;
};

/// Maps a Cricsheet JSON export of a one-day match onto the canonical record.
/// Throws AdaptationError for other formats, super overs or missing innings.
Match adapt_cricsheet(const nlohmann::json& document, std::string match_id,
                      const AdaptOptions& options = {});

struct Violation {
  std::string match_id;
  std::string invariant;
};

/// Empty iff every match satisfies every invariant.
std::vector<Violation> validate_match(const Match& match);
std::vector<Violation> validate_corpus(const Corpus& corpus);

/// Corpus directory: one `<match_id>.json` per match plus `manifest.json`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus read_corpus(const std::filesystem::path& dir);

/// Stable hash of the sorted match ids, embedded in artifacts as provenance.
std::uint64_t manifest_hash(const Corpus& corpus);

}  // namespace cricket
