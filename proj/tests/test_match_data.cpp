#include <doctest.h>

#include <filesystem>

#include "cricket/errors.hpp"
#include "cricket/match_data.hpp"
#include "support.hpp"

using namespace cricket;
using namespace cricket::testing;
using nlohmann::json;

namespace {

json canonical_singles(int n) {
  json dels = json::array();
  for (int i = 0; i < n; ++i)
    dels.push_back({{"over", i / 6}, {"ball_in_over", i % 6}, {"runs_batted", 1},
                    {"is_extra", false}, {"is_wicket", false}});
  return {{"match_id", "m1"}, {"team_first", "A"}, {"team_second", "B"}, {"winner", "A"},
          {"innings", {{{"deliveries", dels}}}}};
}

json cricsheet_doc() {
  return json::parse(R"({
    "info": {"match_type": "ODI", "teams": ["Team A", "Team B"],
             "outcome": {"winner": "Team A", "by": {"wickets": 3}}},
    "innings": [
      {"team": "Team B", "overs": [{"over": 0, "deliveries": [
        {"batter": "x", "runs": {"batter": 0, "extras": 1, "total": 1}, "extras": {"wides": 1}},
        {"batter": "x", "runs": {"batter": 4, "extras": 0, "total": 4}},
        {"batter": "x", "runs": {"batter": 0, "extras": 2, "total": 2}, "extras": {"legbyes": 2}},
        {"batter": "x", "runs": {"batter": 6, "extras": 1, "total": 7}, "extras": {"noballs": 1}},
        {"batter": "x", "runs": {"batter": 0, "extras": 0, "total": 0},
         "wickets": [{"player_out": "x", "kind": "bowled"}]}
      ]}]},
      {"team": "Team A", "overs": [{"over": 0, "deliveries": [
        {"batter": "y", "runs": {"batter": 4, "extras": 0, "total": 4}},
        {"batter": "y", "runs": {"batter": 4, "extras": 0, "total": 4}},
        {"batter": "y", "runs": {"batter": 6, "extras": 0, "total": 6}}
      ]}]}
    ]})");
}

}  // namespace

TEST_SUITE("match_data") {
  TEST_CASE("three hundred singles sum to three hundred") {
    const auto m = parse_match(canonical_singles(300).dump());
    CHECK(m.final_score[0] == 300);
    CHECK(m.wickets_lost[0] == 0);
    CHECK(m.deliveries.size() == 300);
    CHECK_FALSE(m.has_innings(2));
  }

  TEST_CASE("declared final score must agree with the deliveries") {
    auto doc = canonical_singles(12);
    doc["innings"][0]["final_score"] = 13;
    try {
      parse_match(doc.dump());
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "innings[0].final_score");
    }
    doc["innings"][0]["final_score"] = 12;
    CHECK(parse_match(doc.dump()).final_score[0] == 12);
  }

  TEST_CASE("empty delivery list is rejected") {
    auto doc = canonical_singles(0);
    try {
      parse_match(doc.dump());
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("no deliveries") != std::string::npos);
    }
    doc["innings"] = json::array();
    CHECK_THROWS_WITH_AS(parse_match(doc.dump()), doctest::Contains("no deliveries"), ValidationError);
  }

  TEST_CASE("syntax errors carry a line number") {
    const std::string text = "{\n  \"match_id\": \"m\",\n  \"team_first\": ,\n}";
    CHECK_THROWS_WITH_AS(parse_match(text), doctest::Contains("line 3"), ParseError);
    CHECK_THROWS_AS(parse_match("[1, 2]"), ParseError);
    auto doc = canonical_singles(3);
    doc["innings"][0]["deliveries"][1].erase("is_extra");
    CHECK_THROWS_WITH_AS(parse_match(doc.dump()), doctest::Contains("is_extra"), ParseError);
  }

  TEST_CASE("range violations name the offending field") {
    auto doc = canonical_singles(3);
    doc["innings"][0]["deliveries"][2]["runs_batted"] = 7;
    try {
      parse_match(doc.dump());
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "innings[0].deliveries[2].runs_batted");
    }
  }

  TEST_CASE("canonical serialisation round-trips and parsing is deterministic") {
    const auto m = make_match("rt", concat(repeat(runs(4), 7), {extra(1), extra(2), wicket(), runs(5)}),
                              {runs(6), wicket(), runs(0)}, "B");
    const auto text = to_canonical_json(m).dump();
    CHECK(parse_match(text) == m);
    CHECK(parse_match(text) == parse_match(text));
    for (int k = 0; k < 2; ++k) {
      int sum = 0;
      for (const auto& d : m.innings(k + 1)) sum += d.runs_batted;
      CHECK(sum == m.final_score[static_cast<std::size_t>(k)]);
    }
  }

  TEST_CASE("an extra may not advance the ball") {
    Match m = make_match("x", {runs(1), runs(1)}, {});
    m.deliveries[0].is_extra = true;  // next record sits at ball 1
    m.final_score = {2, 0};
    const auto v = validate_match(m);
    REQUIRE(v.size() == 1);
    CHECK(v[0].invariant.find("advanced the ball") != std::string::npos);
  }

  TEST_CASE("validate_corpus reports per-match violations") {
    Corpus corpus;
    corpus.matches.push_back(make_match("ok1", repeat(runs(2), 30), repeat(runs(1), 20)));
    corpus.matches.push_back(make_match("ok2", repeat(runs(3), 10), repeat(runs(4), 10), "B"));
    CHECK(validate_corpus(corpus).empty());

    Match eleven;
    eleven.match_id = "eleven";
    eleven.team_first = "A";
    eleven.team_second = "B";
    eleven.winner = "B";
    eleven.deliveries = deliveries(1, repeat(wicket(), 11));
    eleven.wickets_lost = {11, 0};
    corpus.matches.push_back(eleven);
    auto v = validate_corpus(corpus);
    REQUIRE(v.size() == 1);
    CHECK(v[0].match_id == "eleven");
    CHECK(v[0].invariant.find("wickets_lost exceeds 10") != std::string::npos);

    corpus.matches.pop_back();
    Match shuffled = make_match("shuffled", repeat(runs(1), 12), {});
    std::swap(shuffled.deliveries[3], shuffled.deliveries[9]);
    corpus.matches.push_back(shuffled);
    v = validate_corpus(corpus);
    REQUIRE(v.size() == 1);
    CHECK(v[0].invariant.find("deliveries out of order") != std::string::npos);

    corpus.matches.back() = corpus.matches.front();
    v = validate_corpus(corpus);
    REQUIRE(v.size() == 1);
    CHECK(v[0].invariant == "duplicate match_id");
  }

  TEST_CASE("cricsheet deliveries map onto canonical records") {
    const auto m = adapt_cricsheet(cricsheet_doc(), "cs1");
    CHECK(m.team_first == "Team B");
    CHECK(m.team_second == "Team A");
    CHECK(m.winner == "Team A");
    const auto first = m.innings(1);
    REQUIRE(first.size() == 5);
    CHECK(first[0] == Delivery{1, 0, 0, 1, true, false});   // wide
    CHECK(first[1] == Delivery{1, 0, 0, 4, false, false});  // batter four
    CHECK(first[2] == Delivery{1, 0, 1, 2, false, false});  // leg byes are legal
    CHECK(first[3] == Delivery{1, 0, 2, 6, true, false});   // 6 + no-ball clamped
    CHECK(first[4] == Delivery{1, 0, 2, 0, false, true});
    CHECK(m.final_score[0] == 13);
    CHECK(m.wickets_lost[0] == 1);
    CHECK(m.final_score[1] == 14);
  }

  TEST_CASE("cricsheet documents outside the canonical scope are refused") {
    auto doc = cricsheet_doc();
    doc["info"]["match_type"] = "T20";
    CHECK_THROWS_AS(adapt_cricsheet(doc, "t20"), AdaptationError);

    doc = cricsheet_doc();
    doc["innings"].push_back(doc["innings"][1]);
    doc["innings"][2]["super_over"] = true;
    CHECK_THROWS_WITH_AS(adapt_cricsheet(doc, "so"), doctest::Contains("super-over"), AdaptationError);

    doc = cricsheet_doc();
    doc["innings"].push_back(doc["innings"][1]);
    CHECK_THROWS_WITH_AS(adapt_cricsheet(doc, "three"), doctest::Contains("more than two"),
                         AdaptationError);

    doc = cricsheet_doc();
    doc.erase("innings");
    CHECK_THROWS_AS(adapt_cricsheet(doc, "none"), AdaptationError);
  }

  TEST_CASE("cricsheet results without a winner") {
    auto doc = cricsheet_doc();
    doc["info"]["outcome"] = {{"result", "no result"}};
    CHECK(adapt_cricsheet(doc, "nr").winner == kNoResult);
    doc["info"]["outcome"] = {{"result", "tie"}};
    CHECK(adapt_cricsheet(doc, "tie").winner == kTie);

    doc["info"]["outcome"] = {{"winner", "Team A"}, {"method", "D/L"}};
    CHECK(adapt_cricsheet(doc, "dl").winner == "Team A");
    AdaptOptions strict;
    strict.exclude_dls_decided = true;
    CHECK_THROWS_AS(adapt_cricsheet(doc, "dl", strict), AdaptationError);
  }

  TEST_CASE("corpus directories round-trip with a stable manifest hash") {
    Corpus corpus;
    corpus.source = "unit";
    corpus.ingested_at = "2020-01-01T00:00:00Z";
    corpus.matches.push_back(make_match("a/1", repeat(runs(2), 30), repeat(runs(1), 20)));
    corpus.matches.push_back(make_match("b 2", repeat(runs(3), 10), repeat(runs(4), 10), "B"));
    const auto dir = std::filesystem::temp_directory_path() / "cricket_corpus_rt";
    std::filesystem::remove_all(dir);
    write_corpus(corpus, dir);
    const auto back = read_corpus(dir);
    CHECK(back.matches == corpus.matches);
    CHECK(back.ingested_at == corpus.ingested_at);
    CHECK(manifest_hash(back) == manifest_hash(corpus));
    Corpus reordered = corpus;
    std::swap(reordered.matches[0], reordered.matches[1]);
    CHECK(manifest_hash(reordered) == manifest_hash(corpus));
    std::filesystem::remove_all(dir);
  }
}
