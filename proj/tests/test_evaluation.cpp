#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <set>

#include "cricket/errors.hpp"
#include "cricket/evaluation.hpp"
#include "cricket/io.hpp"
#include "support.hpp"

using namespace cricket;
using namespace cricket::testing;

namespace {

DlsTable table() { return load_dls_table(read_file(std::string(CRICKET_FIXTURES) + "/dls_standard.csv")).table; }

NetworkConfig tiny_net(std::uint64_t seed = 1) {
  NetworkConfig c;
  c.hidden_widths = {4};
  c.epochs = 2;
  c.batch_size = 64;
  c.seed = seed;
  return c;
}

std::vector<Ball> full_innings(int salt) {
  std::vector<Ball> balls;
  for (int i = 0; i < 300; ++i)
    balls.push_back((i + salt) % 41 == 40 ? wicket() : runs(((i + salt) * 7) % 5));
  return balls;
}

Corpus varied_corpus(int n) {
  Corpus c;
  for (int i = 0; i < n; ++i)
    c.matches.push_back(make_match("v" + std::to_string(i), full_innings(i), full_innings(3 * i + 1),
                                   i % 3 == 0 ? "B" : "A"));
  return c;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("projection examples") {
    CHECK(predicted_final_score(100, 0.5) == 200);
    CHECK(predicted_final_score(107, 0.6) == 268);
    CHECK(predicted_final_score(0, 0.9) == 0);
    CHECK(predicted_final_score(50, 0.0) == 50);
    CHECK_THROWS_AS(predicted_final_score(100, 1.0), SaturationError);
    CHECK_THROWS_AS(predicted_final_score(100, 1.5), SaturationError);
    CHECK_THROWS_AS(predicted_final_score(100, -0.1), DomainError);
    CHECK_THROWS_AS(predicted_final_score(-1, 0.5), DomainError);
  }

  TEST_CASE("exact resource fractions project exactly") {
    Rng rng(2024);
    for (int i = 0; i < 10000; ++i) {
      const int actual = 2 + static_cast<int>(uniform_index(rng, 600));
      const int score = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(actual - 1)));
      const double r = static_cast<double>(actual - score) / actual;
      REQUIRE(predicted_final_score(score, r) == actual);
    }
  }

  TEST_CASE("percent error examples and antisymmetry") {
    CHECK(percent_error(268, 250) == doctest::Approx(7.2).epsilon(1e-12));
    CHECK(percent_error(250, 250) == 0.0);
    CHECK(percent_error(240, 250) == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK_THROWS_AS(percent_error(10, 0), DomainError);
    for (int d = 0; d < 100; d += 7) CHECK(percent_error(250 + d, 250) == -percent_error(250 - d, 250));
  }

  TEST_CASE("short innings cannot be interrupted") {
    const auto m = make_match("short", repeat(runs(1), 119), repeat(runs(1), 50), "B");  // ends in over 19
    Rng rng(1);
    CHECK_FALSE(make_interruption(m, 1, rng).has_value());
    const auto m2 = make_match("long", repeat(runs(1), 121), repeat(runs(1), 50));
    CHECK(make_interruption(m2, 1, rng).has_value());
  }

  TEST_CASE("interruptions are deterministic and after the twentieth over") {
    const auto m = make_match("i", full_innings(5), full_innings(6), "B");
    auto a = make_rng(7, "interrupt", 3);
    auto b = make_rng(7, "interrupt", 3);
    const auto x = make_interruption(m, 1, a);
    const auto y = make_interruption(m, 1, b);
    REQUIRE(x);
    REQUIRE(y);
    CHECK(x->state == y->state);
    CHECK(x->score_at_interruption == y->score_at_interruption);

    const auto t = build_trajectory(m, 1);
    Rng rng(99);
    std::set<int> positions;
    for (int i = 0; i < 10000; ++i) {
      const auto cut = make_interruption(m, 1, rng);
      REQUIRE(cut);
      REQUIRE(cut->state.over >= 20);
      positions.insert(cut->state.position());
      CHECK(cut->actual_final_score == m.final_score[0]);
      // Score before the drawn ball, recomputed from the trajectory.
      const auto it = std::find_if(t.begin(), t.end(), [&](const StateStep& s) { return s.state == cut->state; });
      int before = 0;
      for (auto k = t.begin(); k != it; ++k) before += k->runs;
      REQUIRE(before == cut->score_at_interruption);
    }
    CHECK(positions.size() == 180);  // every ball from over 20 onward was drawn
  }

  TEST_CASE("folds partition the matches") {
    for (std::size_t n : {10u, 17u, 100u, 101u}) {
      const auto folds = assign_folds(n, 5);
      REQUIRE(folds.size() == 10);
      std::set<std::size_t> all;
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        for (auto i : f) CHECK(all.insert(i).second);
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
      }
      CHECK(all.size() == n);
      CHECK(hi - lo <= 1);
    }
    CHECK(assign_folds(50, 1) == assign_folds(50, 1));
    CHECK_FALSE(assign_folds(50, 1) == assign_folds(50, 2));
  }

  TEST_CASE("summary uses the sample standard deviation") {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(summarize({4.0}).std == 0.0);
  }

  TEST_CASE("too few eligible matches") {
    auto c = varied_corpus(9);
    CHECK_THROWS_AS(cross_validate(c, tiny_net(), table(), 1, 1), ConfigError);
    c.matches.push_back(make_match("nr", full_innings(2), full_innings(3), std::string(kNoResult)));
    CHECK_THROWS_AS(cross_validate(c, tiny_net(), table(), 1, 1), ConfigError);
    auto wide = tiny_net();
    wide.input_width = 6;
    CHECK_THROWS_AS(cross_validate(varied_corpus(12), wide, table(), 1, 1), ConfigError);
  }

  TEST_CASE("identical matches give identical folds") {
    Corpus c;
    for (int i = 0; i < 20; ++i)
      c.matches.push_back(make_match("same" + std::to_string(i), full_innings(1), full_innings(2)));
    const auto r = cross_validate(c, tiny_net(), table(), 1, 3);
    REQUIRE(r.folds.size() == 10);
    for (const auto& f : r.folds) {
      CHECK(f.model.mean_error_pct == r.folds[0].model.mean_error_pct);
      CHECK(f.dls.mean_error_pct == r.folds[0].dls.mean_error_pct);
      CHECK(f.model.n == 2);
    }
    CHECK(r.model.std < 1e-12);
    CHECK(r.dls.std < 1e-12);
  }

  TEST_CASE("table column depends only on fold membership") {
    const auto c = varied_corpus(30);
    auto other = tiny_net(77);
    other.hidden_widths = {6, 3};
    other.learning_rate = 0.2;
    const auto a = cross_validate(c, tiny_net(), table(), 1, 11);
    const auto b = cross_validate(c, other, table(), 1, 11);
    for (std::size_t f = 0; f < 10; ++f) {
      CHECK(a.folds[f].dls.mean_error_pct == b.folds[f].dls.mean_error_pct);
      CHECK(a.folds[f].dls.n == b.folds[f].dls.n);
    }
    CHECK(a.dls.mean == b.dls.mean);
    CHECK_FALSE(a.model.mean == b.model.mean);
  }

  TEST_CASE("reports are reproducible and independent of the thread count") {
    const auto c = varied_corpus(25);
    const int threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto serial = to_json(cross_validate(c, tiny_net(), table(), 1, 4)).dump();
    omp_set_num_threads(4);
    const auto parallel = to_json(cross_validate(c, tiny_net(), table(), 1, 4)).dump();
    omp_set_num_threads(threads);
    CHECK(serial == parallel);
    CHECK(to_json(cross_validate(c, tiny_net(), table(), 1, 4)).dump() == serial);
  }

  TEST_CASE("second innings evaluation") {
    auto net = tiny_net();
    net.input_width = 6;
    const auto r = cross_validate(varied_corpus(20), net, table(), 2, 8);
    std::size_t n = 0;
    for (const auto& f : r.folds) n += f.model.n + f.skipped + f.degenerate;
    CHECK(n == 20);
    for (const auto& rec : r.records) {
      CHECK(rec.interruption.state.target_band.has_value());
      CHECK(rec.interruption.state.over >= 20);
    }
  }

  TEST_CASE("skips and zero-score interruptions are counted, not averaged") {
    auto c = varied_corpus(12);
    c.matches.push_back(make_match("short", repeat(runs(1), 60), repeat(runs(1), 61), "B"));
    c.matches.push_back(make_match("late", concat(repeat(runs(0), 299), {runs(4)}), repeat(runs(1), 10)));
    const auto r = cross_validate(c, tiny_net(), table(), 1, 2);
    std::size_t skipped = 0, degenerate = 0, scored = 0;
    for (const auto& f : r.folds) {
      skipped += f.skipped;
      degenerate += f.degenerate;
      scored += f.model.n;
    }
    CHECK(skipped == 1);
    CHECK(degenerate == 1);
    CHECK(scored == 12);
    CHECK(r.records.size() == 12);
  }

  TEST_CASE("report exports") {
    const auto r = cross_validate(varied_corpus(10), tiny_net(), table(), 1, 6);
    const auto csv = fold_csv(r);
    CHECK(csv.rfind("fold,method,mean_error_pct,n\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
    const auto j = to_json(r);
    CHECK(j["folds"].size() == 10);
    CHECK(j["summary"]["model"].contains("std"));
  }
}
