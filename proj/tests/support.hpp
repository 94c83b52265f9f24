#pragma once

#include <string>
#include <vector>

#include "cricket/match_data.hpp"

namespace cricket::testing {

struct Ball {
  int runs = 0;
  bool wicket = false;
  bool extra = false;
};

inline Ball runs(int r) { return {r, false, false}; }
inline Ball wicket() { return {0, true, false}; }
inline Ball extra(int r = 1) { return {r, false, true}; }

inline std::vector<Ball> repeat(Ball b, int n) { return std::vector<Ball>(static_cast<std::size_t>(n), b); }

inline std::vector<Ball> concat(std::vector<Ball> a, const std::vector<Ball>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Legal balls advance (over, ball); extras keep the position of the ball to re-bowl.
inline std::vector<Delivery> deliveries(int innings_no, const std::vector<Ball>& balls) {
  std::vector<Delivery> out;
  int legal = 0;
  for (const auto& b : balls) {
    out.push_back({innings_no, legal / 6, legal % 6, b.runs, b.extra, b.wicket});
    if (!b.extra) ++legal;
  }
  return out;
}

inline Match make_match(const std::string& id, const std::vector<Ball>& first,
                        const std::vector<Ball>& second, const std::string& winner = "A") {
  Match m;
  m.match_id = id;
  m.team_first = "A";
  m.team_second = "B";
  m.winner = winner;
  m.deliveries = deliveries(1, first);
  const auto d2 = deliveries(2, second);
  m.deliveries.insert(m.deliveries.end(), d2.begin(), d2.end());
  finalize_match(m);
  return m;
}

}  // namespace cricket::testing
