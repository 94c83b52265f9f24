#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cricket/errors.hpp"
#include "cricket/irl.hpp"
#include "cricket/random.hpp"
#include "support.hpp"

using namespace cricket;
using namespace cricket::testing;

namespace {

Condition unit(std::size_t j, double sign = 1.0) {
  Condition d{};
  d[j] = sign;
  return d;
}

double dot(const RewardCoefficients& c, const Condition& d) {
  double u = 0.0;
  for (std::size_t k = 0; k < 10; ++k) u += c.values[k] * d[k];
  return u;
}

// Best objective over the 1024 corners of the box.
double corner_max(const std::vector<Condition>& pool) {
  double best = -1e300;
  for (unsigned mask = 0; mask < 1024; ++mask) {
    RewardCoefficients c;
    for (std::size_t k = 0; k < 10; ++k) c.values[k] = (mask >> k) & 1 ? 1.0 : -1.0;
    best = std::max(best, lp_objective(pool, c));
  }
  return best;
}

// Exact optimum for conditions supported on coordinates 0..2: the objective is
// piecewise linear, so it peaks at a vertex cut out by three of the planes
// c_k = +-1 and d_i . c = 0.
double vertex_max3(const std::vector<Condition>& pool) {
  std::vector<std::array<double, 4>> planes;  // a . c = b
  for (int k = 0; k < 3; ++k)
    for (double b : {-1.0, 1.0}) {
      std::array<double, 4> p{0, 0, 0, b};
      p[static_cast<std::size_t>(k)] = 1.0;
      planes.push_back(p);
    }
  for (const auto& d : pool) planes.push_back({d[0], d[1], d[2], 0.0});
  double best = -1e300;
  const std::size_t n = planes.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t e = b + 1; e < n; ++e) {
        const auto &p = planes[a], &q = planes[b], &r = planes[e];
        const double det = p[0] * (q[1] * r[2] - q[2] * r[1]) - p[1] * (q[0] * r[2] - q[2] * r[0]) +
                           p[2] * (q[0] * r[1] - q[1] * r[0]);
        if (std::abs(det) < 1e-12) continue;
        // Cramer's rule.
        auto solve = [&](int col) {
          std::array<std::array<double, 3>, 3> m{{{p[0], p[1], p[2]}, {q[0], q[1], q[2]}, {r[0], r[1], r[2]}}};
          m[0][static_cast<std::size_t>(col)] = p[3];
          m[1][static_cast<std::size_t>(col)] = q[3];
          m[2][static_cast<std::size_t>(col)] = r[3];
          return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                  m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                  m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) / det;
        };
        RewardCoefficients c = RewardCoefficients::zeros();
        bool inside = true;
        for (int k = 0; k < 3; ++k) {
          const double v = solve(k);
          if (std::abs(v) > 1.0 + 1e-12) inside = false;
          c.values[static_cast<std::size_t>(k)] = std::clamp(v, -1.0, 1.0);
        }
        if (inside) best = std::max(best, lp_objective(pool, c));
      }
  return best;
}

// Grid search at resolution 1e-3 over coordinates 0 and 1.
double grid_max2(const std::vector<Condition>& pool) {
  double best = -1e300;
  RewardCoefficients c = RewardCoefficients::zeros();
  for (int i = -1000; i <= 1000; ++i)
    for (int j = -1000; j <= 1000; ++j) {
      c.values[0] = i * 1e-3;
      c.values[1] = j * 1e-3;
      best = std::max(best, lp_objective(pool, c));
    }
  return best;
}

Condition random_condition(Rng& rng, std::size_t dims) {
  Condition d{};
  for (std::size_t k = 0; k < dims; ++k) d[k] = 2.0 * uniform01(rng) - 1.0;
  return d;
}

Trajectory scoring_trajectory(int per_ball, int balls) {
  const auto m = make_match("t", repeat(runs(per_ball), balls), {});
  return build_trajectory(m, 1);
}

}  // namespace

TEST_SUITE("irl") {
  TEST_CASE("reward examples") {
    const InningsState s{10, 2, 3, 4, 0, std::nullopt};
    CHECK(reward(s, 0, RewardCoefficients::ones()) == 19.0);
    CHECK(reward(s, 4, RewardCoefficients::ones()) == 4019.0);
    CHECK(reward(s, 6, RewardCoefficients::zeros()) == 0.0);
    CHECK_THROWS_AS(reward(s, 5, RewardCoefficients::ones()), DomainError);
    CHECK_THROWS_AS(reward(s, 7, RewardCoefficients::ones()), DomainError);
  }

  TEST_CASE("reward is linear in the coefficients") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      RewardCoefficients c;
      for (double& v : c.values) v = 2.0 * uniform01(rng) - 1.0;
      RewardCoefficients half = c;
      for (double& v : half.values) v *= 0.5;
      const InningsState s{static_cast<int>(uniform_index(rng, 50)), 3, 17, 2, 1, std::nullopt};
      for (int a : {0, 1, 2, 3, 4, 6}) CHECK(reward(s, a, half) == doctest::Approx(0.5 * reward(s, a, c)));
    }
  }

  TEST_CASE("feature totals") {
    Trajectory dots;
    for (int b = 0; b < 3; ++b) dots.push_back({InningsState{0, 0, 0, b, 0, std::nullopt}, 0, false, 0, false});
    const auto t = feature_totals(dots);
    for (std::size_t k = 5; k < 10; ++k) CHECK(t[k] == 0.0);
    CHECK(t[3] == 0.0 + 1.0 + 2.0);

    const auto two = build_trajectory(make_match("two", {runs(2)}, {}), 1);
    const auto u = feature_totals(two);
    for (std::size_t k = 0; k < 10; ++k) CHECK(u[k] == (k == 6 ? 2000.0 : 0.0));

    const auto five = build_trajectory(make_match("five", {runs(5)}, {}), 1);
    CHECK(feature_totals(five)[8] == 4000.0);
  }

  TEST_CASE("feature totals are additive over concatenation") {
    const auto m = make_match("cat", concat(repeat(runs(1), 40), concat({wicket(), extra(2), runs(6)}, repeat(runs(3), 30))), {});
    const auto t = build_trajectory(m, 1);
    const std::span<const StateStep> all(t);
    for (std::size_t cut : {0u, 1u, 20u, 43u, 73u}) {
      const auto a = feature_totals(all.first(cut));
      const auto b = feature_totals(all.subspan(cut));
      const auto whole = feature_totals(all);
      for (std::size_t k = 0; k < 10; ++k) CHECK(a[k] + b[k] == whole[k]);
    }
    const std::vector<Trajectory> batch{t, scoring_trajectory(2, 50), scoring_trajectory(4, 9)};
    const auto totals = feature_totals_batch(batch);
    for (std::size_t i = 0; i < batch.size(); ++i) CHECK(totals[i] == feature_totals(batch[i]));
  }

  TEST_CASE("expert partition") {
    Corpus c;
    for (int i = 0; i < 6; ++i)
      c.matches.push_back(make_match("m" + std::to_string(i), repeat(runs(1), 30), repeat(runs(1), 20)));
    auto p = partition_expert(c);
    CHECK(p.expert.size() == 6);
    CHECK(p.nonexpert.empty());

    c.matches.push_back(make_match("lost", repeat(runs(1), 30), repeat(runs(2), 20), "B"));
    c.matches.push_back(make_match("tie", repeat(runs(1), 30), repeat(runs(1), 30), std::string(kTie)));
    c.matches.push_back(make_match("nr", repeat(runs(1), 30), {}, std::string(kNoResult)));
    c.matches.push_back(make_match("zero", repeat(runs(0), 30), repeat(runs(1), 3), "B"));
    p = partition_expert(c);
    CHECK(p.expert.size() == 6);
    CHECK(p.nonexpert.size() == 1);
    CHECK(p.excluded == 3);
    CHECK(p.expert.size() + p.nonexpert.size() + p.excluded == c.matches.size());
  }

  TEST_CASE("single condition goes to the matching corner") {
    Condition d{};
    d[6] = 2000.0;
    d[7] = -3000.0;
    const auto sol = solve_lp(std::vector<Condition>{d});
    CHECK(sol.coeffs.y(2) == 1.0);
    CHECK(sol.coeffs.y(3) == -1.0);
    CHECK(sol.objective == doctest::Approx(5000.0));
    CHECK(sol.objective == doctest::Approx(corner_max({d})));
  }

  TEST_CASE("unit conditions") {
    for (std::size_t j = 0; j < 10; ++j) {
      const auto sol = solve_lp(std::vector<Condition>{unit(j)});
      CHECK(sol.coeffs.values[j] == 1.0);
      CHECK(sol.objective == doctest::Approx(1.0));
    }
  }

  TEST_CASE("opposite unit conditions cancel") {
    for (std::size_t j = 0; j < 10; ++j) {
      const std::vector<Condition> pool{unit(j), unit(j, -1.0)};
      const auto sol = solve_lp(pool);
      CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
      // c_j = 0 is the unique optimum; the free coordinates go to -1.
      CHECK(sol.coeffs.values[j] == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(sol.coeffs.values[(j + 1) % 10] == -1.0);
      double best = -1e300;
      RewardCoefficients c = RewardCoefficients::zeros();
      for (int i = -1000; i <= 1000; ++i) {
        c.values[j] = i * 1e-3;
        best = std::max(best, lp_objective(pool, c));
      }
      CHECK(best == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  TEST_CASE("ties resolve to the lexicographically smallest optimum") {
    const auto zero = solve_lp(std::vector<Condition>{Condition{}});
    CHECK(zero.objective == 0.0);
    for (double v : zero.coeffs.values) CHECK(v == -1.0);

    // Optimal set {c0 = 1, c1 free}: c1 must come back as -1.
    const auto sol = solve_lp(std::vector<Condition>{unit(0)});
    CHECK(sol.coeffs.values[1] == -1.0);
  }

  TEST_CASE("a zero condition leaves the solution unchanged") {
    Rng rng(17);
    std::vector<Condition> pool{random_condition(rng, 10), random_condition(rng, 10)};
    const auto before = solve_lp(pool);
    pool.push_back(Condition{});
    const auto after = solve_lp(pool);
    CHECK(after.objective == doctest::Approx(before.objective).epsilon(1e-12));
    for (std::size_t k = 0; k < 10; ++k) CHECK(after.coeffs.values[k] == doctest::Approx(before.coeffs.values[k]));
  }

  TEST_CASE("two-coordinate problems agree with a grid search") {
    Rng rng(2);
    for (int trial = 0; trial < 25; ++trial) {
      const std::vector<Condition> pool{random_condition(rng, 2), random_condition(rng, 2)};
      const auto sol = solve_lp(pool);
      const double grid = grid_max2(pool);
      CHECK(sol.objective >= grid - 1e-9);
      CHECK(sol.objective <= grid + 6e-3);  // objective is 6-Lipschitz in each coordinate here
    }
  }

  TEST_CASE("three-coordinate problems agree with vertex enumeration") {
    Rng rng(4);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<Condition> pool;
      const std::size_t n = 2 + uniform_index(rng, 3);
      for (std::size_t i = 0; i < n; ++i) pool.push_back(random_condition(rng, 3));
      const auto sol = solve_lp(pool);
      CHECK(sol.objective == doctest::Approx(vertex_max3(pool)).epsilon(1e-9));
    }
  }

  TEST_CASE("ten-dimensional pools dominate corners and random points") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Condition> pool;
      for (int i = 0; i < 6; ++i) {
        auto d = random_condition(rng, 10);
        for (std::size_t k = 5; k < 10; ++k) d[k] *= 1000.0;
        pool.push_back(d);
      }
      const auto sol = solve_lp(pool);
      for (double v : sol.coeffs.values) CHECK(std::abs(v) <= 1.0 + 1e-9);
      CHECK(sol.objective >= corner_max(pool) - 1e-6);
      CHECK(sol.objective >= 0.0);
      for (int s = 0; s < 200; ++s) {
        RewardCoefficients c;
        for (double& v : c.values) v = 2.0 * uniform01(rng) - 1.0;
        CHECK(sol.objective >= lp_objective(pool, c) - 1e-6);
      }
    }
  }

  TEST_CASE("positive scaling keeps the solution") {
    Rng rng(21);
    std::vector<Condition> pool;
    for (int i = 0; i < 5; ++i) pool.push_back(random_condition(rng, 10));
    auto scaled = pool;
    for (auto& d : scaled)
      for (double& v : d) v *= 250.0;
    const auto a = solve_lp(pool);
    const auto b = solve_lp(scaled);
    CHECK(b.objective == doctest::Approx(250.0 * a.objective).epsilon(1e-9));
    for (std::size_t k = 0; k < 10; ++k) CHECK(a.coeffs.values[k] == doctest::Approx(b.coeffs.values[k]).epsilon(1e-9));
  }

  TEST_CASE("warm-started solves match cold solves") {
    Rng rng(5);
    RewardLp lp;
    std::vector<Condition> pool;
    for (int i = 0; i < 15; ++i) {
      auto d = random_condition(rng, 10);
      for (std::size_t k = 5; k < 10; ++k) d[k] *= 1000.0;
      pool.push_back(d);
      lp.add_condition(d);
      const auto warm = lp.solve();
      const auto cold = solve_lp(pool);
      CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
      for (std::size_t k = 0; k < 10; ++k) CHECK(warm.coeffs.values[k] == doctest::Approx(cold.coeffs.values[k]).epsilon(1e-9));
    }
  }

  TEST_CASE("empty pool") {
    CHECK_THROWS_AS(solve_lp(std::vector<Condition>{}), DomainError);
    RewardLp lp;
    CHECK_THROWS_AS(lp.solve(), DomainError);
  }

  TEST_CASE("twos beat threes") {
    const std::vector<Trajectory> expert{scoring_trajectory(2, 120), scoring_trajectory(2, 120)};
    const std::vector<Trajectory> nonexpert{scoring_trajectory(3, 120)};
    const auto r = run_irl(expert, nonexpert);
    CHECK(r.coeffs.y(2) > r.coeffs.y(3));
    CHECK(r.log.size() == 1);
    double ones_value = 0.0;
    for (double t : feature_totals(nonexpert[0])) ones_value += t;
    CHECK(r.log[0].nonexpert_value == doctest::Approx(ones_value));
    CHECK(r.objective > 0.0);
  }

  TEST_CASE("irl bookkeeping") {
    const std::vector<Trajectory> expert{scoring_trajectory(2, 60)};
    const auto alone = run_irl(expert, std::vector<Trajectory>{});
    CHECK(alone.coeffs.values == RewardCoefficients::ones().values);
    CHECK(alone.warnings.size() == 1);
    CHECK_THROWS_AS(run_irl(std::vector<Trajectory>{}, expert), DomainError);

    const std::vector<Trajectory> nonexpert{scoring_trajectory(1, 60), scoring_trajectory(4, 30),
                                            scoring_trajectory(6, 20)};
    const auto r = run_irl(expert, nonexpert);
    REQUIRE(r.log.size() == 3);
    std::vector<Condition> pool;
    const auto mean = feature_totals(expert[0]);
    for (std::size_t i = 0; i < 3; ++i) {
      Condition d;
      const auto t = feature_totals(nonexpert[i]);
      for (std::size_t k = 0; k < 10; ++k) d[k] = mean[k] - t[k];
      pool.push_back(d);
      CHECK(r.log[i].objective == doctest::Approx(solve_lp(pool).objective).epsilon(1e-9));
    }
    CHECK(dot(r.coeffs, pool[0]) == doctest::Approx(dot(r.log[2].coeffs, pool[0])));
  }

  TEST_CASE("coefficients file round-trips") {
    IrlResult r;
    r.coeffs.values = {1, -1, 0.5, 0.25, -0.125, 1, 0.75, -1, 0.5, 0.625};
    r.objective = 12.5;
    const auto back = coefficients_from_json(nlohmann::json::parse(to_json(r).dump()));
    CHECK(back.values == r.coeffs.values);
    auto j = to_json(r);
    CHECK(j["y"].contains("6"));
    j["x"][0] = 1.5;
    CHECK_THROWS_AS(coefficients_from_json(j), ParseError);
    j = to_json(r);
    j["y"].erase("4");
    CHECK_THROWS_AS(coefficients_from_json(j), ParseError);
  }
}
