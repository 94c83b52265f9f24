#include "cricket/match_data.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <optional>
#include <set>

#include "cricket/errors.hpp"
#include "cricket/io.hpp"
#include "cricket/random.hpp"

namespace cricket {

using nlohmann::json;

std::vector<Delivery> Match::innings(int innings_no) const {
  std::vector<Delivery> out;
  for (const auto& d : deliveries)
    if (d.innings_no == innings_no) out.push_back(d);
  return out;
}

bool Match::has_innings(int innings_no) const {
  return std::any_of(deliveries.begin(), deliveries.end(),
                     [&](const Delivery& d) { return d.innings_no == innings_no; });
}

namespace {

struct Problem {
  std::string field;
  std::string message;
};

std::string delivery_field(int innings, std::size_t index, const char* name) {
  return "innings[" + std::to_string(innings - 1) + "].deliveries[" + std::to_string(index) +
         "]." + name;
}

// Invariant checks shared by parse_match (throws on the first) and
// validate_corpus (collects all).
std::vector<Problem> check_match(const Match& m) {
  std::vector<Problem> out;
  if (m.deliveries.empty()) {
    out.push_back({"innings", "no deliveries"});
    return out;
  }
  std::array<int, 2> runs{0, 0};
  std::array<int, 2> wickets{0, 0};
  for (int inn = 1; inn <= 2; ++inn) {
    std::size_t index = 0;
    const Delivery* prev = nullptr;
    bool ordered = true;
    for (const auto& d : m.deliveries) {
      if (d.innings_no != inn) continue;
      if (d.over < 0 || d.over > 49)
        out.push_back({delivery_field(inn, index, "over"), "over out of range [0,49]"});
      if (d.ball_in_over < 0 || d.ball_in_over > 5)
        out.push_back({delivery_field(inn, index, "ball_in_over"), "ball_in_over out of range [0,5]"});
      if (d.runs_batted < 0 || d.runs_batted > 6)
        out.push_back({delivery_field(inn, index, "runs_batted"), "runs_batted out of range [0,6]"});
      if (prev != nullptr) {
        if (d.over < prev->over || (d.over == prev->over && d.ball_in_over < prev->ball_in_over))
          ordered = false;
        if (prev->is_extra && (d.over != prev->over || d.ball_in_over != prev->ball_in_over))
          out.push_back({delivery_field(inn, index, "ball_in_over"),
                         "delivery after an extra advanced the ball"});
      }
      runs[inn - 1] += d.runs_batted;
      wickets[inn - 1] += d.is_wicket ? 1 : 0;
      prev = &d;
      ++index;
    }
    if (!ordered) out.push_back({"innings[" + std::to_string(inn - 1) + "].deliveries",
                                 "deliveries out of order"});
  }
  bool grouped = true;
  for (std::size_t i = 0; i < m.deliveries.size(); ++i) {
    const int inn = m.deliveries[i].innings_no;
    if (inn != 1 && inn != 2) {
      out.push_back({"innings", "innings_no must be 1 or 2"});
      grouped = false;
      break;
    }
    if (i > 0 && inn < m.deliveries[i - 1].innings_no) grouped = false;
  }
  if (!grouped) out.push_back({"deliveries", "deliveries out of order"});
  for (int k = 0; k < 2; ++k) {
    const std::string prefix = "innings[" + std::to_string(k) + "].";
    if (wickets[k] > 10) out.push_back({prefix + "wickets_lost", "wickets_lost exceeds 10"});
    if (m.final_score[k] != runs[k])
      out.push_back({prefix + "final_score", "final_score " + std::to_string(m.final_score[k]) +
                                                 " disagrees with delivery sum " +
                                                 std::to_string(runs[k])});
    if (m.wickets_lost[k] != wickets[k])
      out.push_back({prefix + "wickets_lost", "wickets_lost disagrees with wicket deliveries"});
  }
  if (m.winner != m.team_first && m.winner != m.team_second && m.winner != kTie &&
      m.winner != kNoResult)
    out.push_back({"winner", "winner '" + m.winner + "' is neither team, tie nor no result"});
  return out;
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

template <class T>
T field_as(const json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key))
    throw ParseError(where + ": missing key '" + key + "'");
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

void finalize_match(Match& match) {
  match.final_score = {0, 0};
  match.wickets_lost = {0, 0};
  for (const auto& d : match.deliveries) {
    if (d.innings_no < 1 || d.innings_no > 2) continue;
    match.final_score[d.innings_no - 1] += d.runs_batted;
    match.wickets_lost[d.innings_no - 1] += d.is_wicket ? 1 : 0;
  }
  if (auto problems = check_match(match); !problems.empty())
    throw ValidationError(problems.front().field, problems.front().message);
}

Match parse_match(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("line 1: match document must be a JSON object");

  Match m;
  m.match_id = field_as<std::string>(doc, "match_id", "match");
  m.team_first = field_as<std::string>(doc, "team_first", "match");
  m.team_second = field_as<std::string>(doc, "team_second", "match");
  m.winner = field_as<std::string>(doc, "winner", "match");
  const auto innings = field_as<json>(doc, "innings", "match");
  if (!innings.is_array()) throw ParseError("match.innings: expected an array");
  if (innings.size() > 2) throw ValidationError("innings", "more than two innings");

  std::array<std::optional<int>, 2> declared_score;
  std::array<std::optional<int>, 2> declared_wickets;
  for (std::size_t k = 0; k < innings.size(); ++k) {
    const std::string where = "innings[" + std::to_string(k) + "]";
    const auto& inn = innings[k];
    const auto deliveries = field_as<json>(inn, "deliveries", where);
    if (!deliveries.is_array()) throw ParseError(where + ".deliveries: expected an array");
    if (deliveries.empty()) throw ValidationError(where + ".deliveries", "no deliveries");
    for (std::size_t j = 0; j < deliveries.size(); ++j) {
      const std::string dwhere = where + ".deliveries[" + std::to_string(j) + "]";
      const auto& d = deliveries[j];
      Delivery rec;
      rec.innings_no = static_cast<int>(k) + 1;
      rec.over = field_as<int>(d, "over", dwhere);
      rec.ball_in_over = field_as<int>(d, "ball_in_over", dwhere);
      rec.runs_batted = field_as<int>(d, "runs_batted", dwhere);
      rec.is_extra = field_as<bool>(d, "is_extra", dwhere);
      rec.is_wicket = field_as<bool>(d, "is_wicket", dwhere);
      m.deliveries.push_back(rec);
    }
    if (inn.contains("final_score")) declared_score[k] = field_as<int>(inn, "final_score", where);
    if (inn.contains("wickets_lost"))
      declared_wickets[k] = field_as<int>(inn, "wickets_lost", where);
  }
  finalize_match(m);
  for (int k = 0; k < 2; ++k) {
    const std::string where = "innings[" + std::to_string(k) + "]";
    if (declared_score[k] && *declared_score[k] != m.final_score[k])
      throw ValidationError(where + ".final_score",
                            "declared " + std::to_string(*declared_score[k]) +
                                " disagrees with delivery sum " + std::to_string(m.final_score[k]));
    if (declared_wickets[k] && *declared_wickets[k] != m.wickets_lost[k])
      throw ValidationError(where + ".wickets_lost",
                            "declared " + std::to_string(*declared_wickets[k]) +
                                " disagrees with wicket count " + std::to_string(m.wickets_lost[k]));
  }
  return m;
}

json to_canonical_json(const Match& match) {
  json innings = json::array();
  for (int inn = 1; inn <= 2; ++inn) {
    if (!match.has_innings(inn)) continue;
    json deliveries = json::array();
    for (const auto& d : match.deliveries) {
      if (d.innings_no != inn) continue;
      deliveries.push_back({{"over", d.over},
                            {"ball_in_over", d.ball_in_over},
                            {"runs_batted", d.runs_batted},
                            {"is_extra", d.is_extra},
                            {"is_wicket", d.is_wicket}});
    }
    innings.push_back({{"final_score", match.final_score[inn - 1]},
                       {"wickets_lost", match.wickets_lost[inn - 1]},
                       {"deliveries", std::move(deliveries)}});
  }
  return {{"match_id", match.match_id},
          {"team_first", match.team_first},
          {"team_second", match.team_second},
          {"winner", match.winner},
          {"innings", std::move(innings)}};
}

Match adapt_cricsheet(const json& document, std::string match_id, const AdaptOptions& options) {
  if (!document.is_object() || !document.contains("info"))
    throw AdaptationError(match_id + ": not a Cricsheet JSON document (no 'info')");
  const auto& info = document.at("info");
  const std::string type = info.value("match_type", "");
  if (type != "ODI" && type != "ODM")
    throw AdaptationError(match_id + ": match_type '" + type + "' is not a one-day format");
  if (!document.contains("innings") || !document.at("innings").is_array() ||
      document.at("innings").empty())
    throw AdaptationError(match_id + ": missing innings markers");

  const auto& outcome = info.value("outcome", json::object());
  if (options.exclude_dls_decided && outcome.contains("method"))
    throw AdaptationError(match_id + ": result decided by " +
                          outcome.at("method").get<std::string>() + " (excluded by filter)");

  Match m;
  m.match_id = std::move(match_id);
  const auto& innings = document.at("innings");
  int inn_no = 0;
  for (const auto& inn : innings) {
    if (inn.value("super_over", false))
      throw AdaptationError(m.match_id + ": super-over content is not supported");
    if (!inn.contains("team") || !inn.contains("overs"))
      throw AdaptationError(m.match_id + ": innings without team/overs markers");
    ++inn_no;
    if (inn_no > 2) throw AdaptationError(m.match_id + ": more than two innings");
    if (inn_no == 1) m.team_first = inn.at("team").get<std::string>();
    if (inn_no == 2) m.team_second = inn.at("team").get<std::string>();
    for (const auto& over : inn.at("overs")) {
      const int over_no = over.at("over").get<int>();
      if (over_no < 0 || over_no > 49)
        throw AdaptationError(m.match_id + ": over " + std::to_string(over_no) +
                              " outside a 50-over innings");
      int legal = 0;
      for (const auto& del : over.at("deliveries")) {
        const auto& runs = del.at("runs");
        const auto extras = del.value("extras", json::object());
        Delivery d;
        d.innings_no = inn_no;
        d.over = over_no;
        // Overs with miscounted seventh balls share the last index.
        d.ball_in_over = std::min(legal, 5);
        d.is_extra = extras.contains("wides") || extras.contains("noballs");
        d.is_wicket = del.contains("wickets") && !del.at("wickets").empty();
        d.runs_batted =
            std::min(runs.value("batter", 0) + runs.value("extras", 0), 6);
        if (!d.is_extra) ++legal;
        m.deliveries.push_back(d);
      }
    }
  }
  if (m.team_second.empty()) {
    for (const auto& t : info.value("teams", json::array()))
      if (t.get<std::string>() != m.team_first) m.team_second = t.get<std::string>();
  }
  if (outcome.contains("winner")) {
    m.winner = outcome.at("winner").get<std::string>();
  } else if (outcome.value("result", "") == "tie") {
    m.winner = std::string(kTie);
  } else {
    m.winner = std::string(kNoResult);
  }
  if (m.deliveries.empty()) throw AdaptationError(m.match_id + ": no deliveries");
  try {
    finalize_match(m);
  } catch (const ValidationError& e) {
    throw AdaptationError(m.match_id + ": " + e.what());
  }
  return m;
}

std::vector<Violation> validate_match(const Match& match) {
  std::vector<Violation> out;
  for (auto& p : check_match(match)) out.push_back({match.match_id, p.field + ": " + p.message});
  return out;
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> out;
  std::set<std::string> seen;
  for (const auto& m : corpus.matches) {
    if (!seen.insert(m.match_id).second) out.push_back({m.match_id, "duplicate match_id"});
    auto v = validate_match(m);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::uint64_t manifest_hash(const Corpus& corpus) {
  std::vector<std::string> ids;
  for (const auto& m : corpus.matches) ids.push_back(m.match_id);
  std::sort(ids.begin(), ids.end());
  std::uint64_t h = fnv1a("");
  for (const auto& id : ids) h = fnv1a(id + "\n", h);
  return h;
}

namespace {

std::string file_name_for(const std::string& id) {
  std::string name;
  for (char c : id) name += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return name + ".json";
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json ids = json::array();
  json files = json::array();
  for (const auto& m : corpus.matches) {
    const auto name = file_name_for(m.match_id);
    write_file_atomic(dir / name, to_canonical_json(m).dump(1));
    ids.push_back(m.match_id);
    files.push_back(name);
  }
  json manifest = {{"match_ids", ids},
                   {"files", files},
                   {"source", corpus.source},
                   {"ingested_at", corpus.ingested_at.empty() ? utc_now() : corpus.ingested_at},
                   {"manifest_hash", std::to_string(manifest_hash(corpus))}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2));
}

Corpus read_corpus(const std::filesystem::path& dir) {
  const auto text = read_file(dir / "manifest.json");
  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("manifest.json line " + std::to_string(line_of_offset(text, e.byte)) + ": " +
                     e.what());
  }
  Corpus corpus;
  corpus.source = manifest.value("source", dir.string());
  corpus.ingested_at = manifest.value("ingested_at", "");
  const auto ids = field_as<std::vector<std::string>>(manifest, "match_ids", "manifest");
  for (const auto& id : ids) {
    const auto path = dir / file_name_for(id);
    try {
      corpus.matches.push_back(parse_match(read_file(path)));
    } catch (const Error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    if (corpus.matches.back().match_id != id)
      throw ValidationError("manifest.match_ids", "file " + path.string() + " holds match '" +
                                                      corpus.matches.back().match_id + "'");
  }
  return corpus;
}

}  // namespace cricket
