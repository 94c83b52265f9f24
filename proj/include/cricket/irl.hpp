#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cricket/lp.hpp"
#include "cricket/match_data.hpp"
#include "cricket/state_space.hpp"

namespace cricket {

using Trajectory = std::vector<StateStep>;

/// Ten reward weights, each in [-1, 1]: five state weights (over, wickets,
/// score band, ball, extra flag) then five action weights for 1, 2, 3, 4 and 6 runs.
struct RewardCoefficients {
  std::array<double, 10> values{1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

  /// State weight, 1-based (x1..x5).
  double x(int i) const { return values.at(static_cast<std::size_t>(i - 1)); }
  /// Action weight for 1, 2, 3, 4 or 6 runs. Throws DomainError otherwise.
  double y(int action) const;

  static RewardCoefficients zeros() { return RewardCoefficients{{}}; }
  static RewardCoefficients ones() { return RewardCoefficients{}; }
};

/// Slot of an action weight in RewardCoefficients::values (5..9); -1 for a dot ball.
int action_weight_slot(int action);

/// Linear reward: state weights dotted with raw state components, plus
/// y_a * 1000 * a for a scoring action.
double reward(const InningsState& state, int action, const RewardCoefficients& coeffs);

using FeatureTotals = std::array<double, 10>;

/// Undiscounted per-trajectory feature sums aligned with RewardCoefficients.
FeatureTotals feature_totals(std::span<const StateStep> trajectory);

/// Totals of many trajectories, computed in parallel; result order follows input.
std::vector<FeatureTotals> feature_totals_batch(std::span<const Trajectory> trajectories);

/// Arithmetic mean of the per-trajectory totals.
FeatureTotals mean_totals(std::span<const FeatureTotals> totals);

struct ExpertPartition {
  std::vector<Trajectory> expert;     // first innings of match winners
  std::vector<Trajectory> nonexpert;  // first innings of match losers
  std::size_t excluded = 0;           // ties, no results, unusable first innings
};

ExpertPartition partition_expert(const Corpus& corpus);

using Condition = FeatureTotals;  // expert mean minus one non-expert total

/// Concave piecewise-linear penalty: x when x >= 0, 2x otherwise.
inline double penalty(double x) { return x >= 0.0 ? x : 2.0 * x; }

/// Sum of penalty(c . d_i) over the pool.
double lp_objective(std::span<const Condition> pool, const RewardCoefficients& coeffs);

struct LpSolution {
  RewardCoefficients coeffs;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Incremental solver for max sum_i penalty(c . d_i) over the box [-1,1]^10.
/// Conditions are appended one at a time and each solve warm-starts from the
/// previous optimal basis. Among optimal points the lexicographically smallest
/// coefficient vector is returned.
class RewardLp {
 public:
  void add_condition(const Condition& d);
  LpSolution solve();
  std::size_t size() const { return pool_.size(); }

 private:
  lp::BoundedSimplex simplex_;
  std::vector<Condition> pool_;
  std::vector<double> objective_;  // scaled sum of conditions on c, -1 on each shortfall column
  double scale_ = 0.0;
};

/// One-shot solve of the pool. Throws DomainError for an empty pool.
LpSolution solve_lp(std::span<const Condition> pool);

struct IrlIteration {
  std::size_t index = 0;
  double nonexpert_value = 0.0;  // value of this trajectory under the previous weights
  double objective = 0.0;
  RewardCoefficients coeffs;
};

struct IrlResult {
  RewardCoefficients coeffs;
  double objective = 0.0;
  std::vector<IrlIteration> log;
  std::vector<std::string> warnings;
};

/// Weights start at one; each non-expert trajectory, in input order, adds the
/// condition (expert mean - its totals) and the LP is re-solved over the pool.
IrlResult run_irl(std::span<const Trajectory> expert, std::span<const Trajectory> nonexpert);

/// Coefficients file payload: {x:[5], y:{"1":..,"6":..}, objective, iterations}.
nlohmann::json to_json(const IrlResult& result);
RewardCoefficients coefficients_from_json(const nlohmann::json& j);

}  // namespace cricket
