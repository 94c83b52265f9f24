#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cricket/match_data.hpp"
#include "cricket/policy.hpp"
#include "cricket/random.hpp"
#include "cricket/state_space.hpp"

namespace cricket {

enum class SimMode { Behavioral, Optimal };

std::string to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& text);

/// Where a simulation starts. `target` is the first-innings score to beat and is
/// set exactly for second-innings starts.
struct SimStart {
  int over = 0;
  int ball = 0;
  int wickets = 0;
  int score = 0;
  int extra_flag = 0;
  std::optional<int> target;

  int innings() const { return target ? 2 : 1; }
  InningsState state() const;
  static SimStart from_state(const InningsState& s, int score, std::optional<int> target);
};

struct SimulationConfig {
  int n_sims = 100;
  std::uint64_t seed = 0;
  SimMode mode = SimMode::Behavioral;
  SimStart start;
};

struct SimulatedInnings {
  int final_score = 0;
  int wickets = 0;
  int balls = 0;
  std::vector<StateStep> trajectory;  // filled only when requested
};

/// Plays one innings ball by ball: wicket first, then the action (policy with
/// probability 1 - nonoptimal_prob in optimal mode, else a draw from the run
/// distribution). Every simulated ball is legal. Stops at over 50, ten wickets or,
/// when chasing, once the score passes the target.
SimulatedInnings simulate_innings(const TransitionModel& model, const PolicyTable* policy,
                                  const SimStart& start, Rng& rng, bool keep_trajectory = false);

struct MatchOutcome {
  int score_1 = 0;
  int score_2 = 0;
  int winner = 0;  // 1, 2, or 0 for a tie
};

/// First innings (optimal when a policy is given) then a behavioural chase of it.
/// `index` selects an independent stream under `seed`.
MatchOutcome simulate_match(const TransitionModel& model_1, const TransitionModel& model_2,
                            const PolicyTable* policy, std::uint64_t seed, std::uint64_t index = 0);

struct ScoreDistribution {
  std::map<int, std::size_t> histogram;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation of the simulated scores
  std::size_t n = 0;

  friend bool operator==(const ScoreDistribution&, const ScoreDistribution&) = default;
};

ScoreDistribution distribution_from_scores(const std::vector<int>& scores);

/// Final scores of `config.n_sims` simulations; simulation i draws from the stream
/// (seed, i), so the result does not depend on the thread count. Throws ConfigError
/// for optimal mode without a policy or outside the first innings.
std::vector<int> simulate_scores(const SimulationConfig& config, const TransitionModel& model,
                                 const PolicyTable* policy);
ScoreDistribution posterior_distribution(const SimulationConfig& config,
                                         const TransitionModel& model, const PolicyTable* policy);

struct MatchError {
  std::string match_id;
  InningsState state;
  int score_at_interruption = 0;
  int actual = 0;
  double simulated_mean = 0.0;
  double error_pct = 0.0;
};

struct SimulatorErrorReport {
  int innings_no = 1;
  SimMode mode = SimMode::Behavioral;
  int n_sims = 0;
  std::uint64_t seed = 0;
  std::vector<MatchError> matches;
  std::size_t skipped = 0;
  double mean_error_pct = 0.0;
  double std_error_pct = 0.0;  // sample standard deviation over matches
};

/// Interrupts every eligible match once (as in cross-validation), simulates the
/// rest of the innings `n_sims` times and compares the mean simulated final score
/// with the actual one. `config.start` is ignored. Matches run in parallel.
SimulatorErrorReport simulator_error_report(const Corpus& corpus, int innings_no,
                                            const TransitionModel& model,
                                            const PolicyTable* policy,
                                            const SimulationConfig& config);

/// Builds a complete two-innings match by sampling both models. With `extras` the
/// extra probability of each state also produces wides, which re-bowl the ball.
Match synthesize_match(const TransitionModel& model_1, const TransitionModel& model_2,
                       std::uint64_t seed, std::uint64_t index, bool extras = false);

nlohmann::json to_json(const ScoreDistribution& dist, SimMode mode);
ScoreDistribution distribution_from_json(const nlohmann::json& j);
/// `final_score,count` rows in increasing score order.
std::string distribution_csv(const ScoreDistribution& dist);
nlohmann::json to_json(const SimulatorErrorReport& report);

namespace detail {
void check_simulation(const SimulationConfig& config, const TransitionModel& model,
                      const PolicyTable* policy);
MatchError simulate_interrupted(const Match& match, int innings_no, const TransitionModel& model,
                                const PolicyTable* policy, const SimulationConfig& config,
                                std::size_t match_index, bool& skipped);
SimulatorErrorReport finish_report(int innings_no, const SimulationConfig& config,
                                   std::vector<std::optional<MatchError>> per_match);
}  // namespace detail

}  // namespace cricket
