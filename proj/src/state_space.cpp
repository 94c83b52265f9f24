#include "cricket/state_space.hpp"

#include <algorithm>

#include "cricket/errors.hpp"

namespace cricket {

int action_slot(int runs) {
  switch (runs) {
    case 0: return 0;
    case 1: return 1;
    case 2: return 2;
    case 3: return 3;
    case 4:
    case 5: return 4;
    case 6: return 5;
    default: throw DomainError("no action slot for " + std::to_string(runs) + " runs");
  }
}

std::string to_string(const InningsState& s) {
  std::string out = "(" + std::to_string(s.over) + "," + std::to_string(s.wickets) + "," +
                    std::to_string(s.score_band);
  if (s.target_band) out += "," + std::to_string(*s.target_band);
  return out + "," + std::to_string(s.ball) + "," + std::to_string(s.extra_flag) + ")";
}

int score_band(int score) {
  if (score < 0) throw DomainError("negative score " + std::to_string(score));
  return std::min(score / 10, kBands - 1);
}

bool valid_state(const InningsState& s) {
  auto in = [](int v, int hi) { return v >= 0 && v <= hi; };
  return in(s.over, kOvers) && in(s.wickets, kWickets) && in(s.score_band, kBands - 1) &&
         in(s.ball, kBallsPerOver - 1) && in(s.extra_flag, 1) &&
         (!s.target_band || in(*s.target_band, kBands - 1));
}

std::uint32_t encode_state(const InningsState& s) {
  if (!valid_state(s)) throw DomainError("state out of range: " + to_string(s));
  std::uint32_t idx = static_cast<std::uint32_t>(s.over);
  idx = idx * 11 + static_cast<std::uint32_t>(s.wickets);
  idx = idx * 50 + static_cast<std::uint32_t>(s.score_band);
  if (s.target_band) idx = idx * 50 + static_cast<std::uint32_t>(*s.target_band);
  idx = idx * 6 + static_cast<std::uint32_t>(s.ball);
  idx = idx * 2 + static_cast<std::uint32_t>(s.extra_flag);
  return idx;
}

InningsState decode_state(std::uint32_t index, int innings_no) {
  const std::uint32_t limit = innings_no == 1 ? kFirstInningsStates : kSecondInningsStates;
  if ((innings_no != 1 && innings_no != 2) || index >= limit)
    throw DomainError("state index " + std::to_string(index) + " out of range for innings " +
                      std::to_string(innings_no));
  InningsState s;
  s.extra_flag = static_cast<int>(index % 2);
  index /= 2;
  s.ball = static_cast<int>(index % 6);
  index /= 6;
  if (innings_no == 2) {
    s.target_band = static_cast<int>(index % 50);
    index /= 50;
  }
  s.score_band = static_cast<int>(index % 50);
  index /= 50;
  s.wickets = static_cast<int>(index % 11);
  s.over = static_cast<int>(index / 11);
  return s;
}

std::vector<StateStep> build_trajectory(const Match& match, int innings_no) {
  if (innings_no != 1 && innings_no != 2)
    throw DomainError("innings_no must be 1 or 2");
  std::optional<int> target_band;
  int target = 0;
  if (innings_no == 2) {
    target = match.score(1);
    target_band = score_band(target);
  }
  std::vector<StateStep> out;
  int score = 0;
  int wickets = 0;
  const Delivery* prev = nullptr;
  for (const auto& d : match.deliveries) {
    if (d.innings_no != innings_no) continue;
    if (innings_no == 2 && score > target) break;
    StateStep step;
    step.state.over = d.over;
    step.state.ball = d.ball_in_over;
    step.state.wickets = std::min(wickets, kWickets);
    step.state.score_band = score_band(score);
    step.state.extra_flag = (prev != nullptr && prev->is_extra && prev->over == d.over &&
                             prev->ball_in_over == d.ball_in_over)
                                ? 1
                                : 0;
    step.state.target_band = target_band;
    step.action = action_from_runs(d.runs_batted);
    step.wicket = d.is_wicket;
    step.runs = d.runs_batted;
    step.extra = d.is_extra;
    out.push_back(step);
    score += d.runs_batted;
    wickets += d.is_wicket ? 1 : 0;
    prev = &d;
  }
  if (out.empty())
    throw DomainError(match.match_id + ": innings " + std::to_string(innings_no) + " missing");
  if (score == 0) throw DomainError(match.match_id + ": zero-score innings");
  return out;
}

std::vector<double> normalize_features(const InningsState& s) {
  std::vector<double> f{s.over / 50.0, s.wickets / 10.0, s.score_band / 49.0, s.ball / 5.0,
                        static_cast<double>(s.extra_flag)};
  if (s.target_band) f.push_back(*s.target_band / 49.0);
  return f;
}

std::vector<McSample> mc_targets(std::span<const StateStep> trajectory, int final_score) {
  if (final_score <= 0) throw DomainError("MC target undefined for final score " +
                                          std::to_string(final_score));
  if (trajectory.empty()) throw DomainError("empty trajectory");
  std::vector<McSample> out;
  out.reserve(trajectory.size());
  int scored = 0;
  const double total = final_score;
  for (const auto& step : trajectory) {
    out.push_back({normalize_features(step.state), (final_score - scored) / total});
    scored += step.runs;
  }
  return out;
}

std::string trajectory_jsonl(std::span<const StateStep> trajectory) {
  std::string out;
  for (const auto& step : trajectory) {
    nlohmann::json state = {{"over", step.state.over},
                            {"wickets", step.state.wickets},
                            {"score_band", step.state.score_band},
                            {"ball", step.state.ball},
                            {"extra_flag", step.state.extra_flag}};
    if (step.state.target_band) state["target_band"] = *step.state.target_band;
    nlohmann::json line = {{"state", state},
                           {"action", step.action},
                           {"wicket", step.wicket},
                           {"runs", step.runs}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace cricket
