#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cricket/match_data.hpp"

namespace cricket {

/// Per-ball actions: runs the batting side sets out to score. Five is folded into four.
inline constexpr std::array<int, 6> kActions{0, 1, 2, 3, 4, 6};

/// Position of `runs` in kActions (5 maps to the slot of 4). Throws DomainError.
int action_slot(int runs);
inline int action_from_runs(int runs) { return runs == 5 ? 4 : runs; }

inline constexpr int kOvers = 50;
inline constexpr int kWickets = 10;
inline constexpr int kBands = 50;
inline constexpr int kBallsPerOver = 6;

inline constexpr std::uint32_t kFirstInningsStates = 51u * 11 * 50 * 6 * 2;         // 336,600
inline constexpr std::uint32_t kSecondInningsStates = 51u * 11 * 50 * 50 * 6 * 2;   // 16,830,000

/// Discrete innings state. `target_band` is present exactly for second-innings states.
struct InningsState {
  int over = 0;        // 0..50
  int wickets = 0;     // 0..10
  int score_band = 0;  // 0..49
  int ball = 0;        // 0..5
  int extra_flag = 0;  // 0..1
  std::optional<int> target_band;

  int innings() const { return target_band ? 2 : 1; }
  bool terminal() const { return over >= kOvers || wickets >= kWickets; }
  int position() const { return over * kBallsPerOver + ball; }

  friend bool operator==(const InningsState&, const InningsState&) = default;
};

std::string to_string(const InningsState& s);

/// min(floor(score / 10), 49). Throws DomainError for negative scores.
int score_band(int score);

/// Row-major index over [51,11,50,6,2] (first innings) or
/// [51,11,50,50,6,2] with the target band after the score band (second innings).
std::uint32_t encode_state(const InningsState& s);
InningsState decode_state(std::uint32_t index, int innings_no);

/// True when every component is inside its range.
bool valid_state(const InningsState& s);

struct StateStep {
  InningsState state;  // state in which the delivery was bowled
  int action = 0;      // element of kActions
  bool wicket = false;
  int runs = 0;        // runs credited, 0..6
  bool extra = false;
};

/// State sequence of one innings. Extras move to (same over, same ball, flag 1) and
/// further extras stay there. Second-innings trajectories carry the target band of
/// the first-innings score and stop at the winning run.
/// Throws DomainError for zero-score innings or a missing innings.
std::vector<StateStep> build_trajectory(const Match& match, int innings_no);

struct McSample {
  std::vector<double> features;
  double target = 0.0;
};

/// Remaining-run fraction (final - scored_before) / final for every step.
std::vector<McSample> mc_targets(std::span<const StateStep> trajectory, int final_score);

/// Feature vector fed to the value network: every component scaled into [0,1].
std::vector<double> normalize_features(const InningsState& s);

/// One JSON object per line: state, action, wicket, runs.
std::string trajectory_jsonl(std::span<const StateStep> trajectory);

}  // namespace cricket
