#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cricket/irl.hpp"
#include "cricket/match_data.hpp"
#include "cricket/state_space.hpp"

namespace cricket {

/// Delivery counts observed in one state (or one aggregate of states). Counts are
/// doubles so constructed models may carry fractional weights.
struct DeliveryCounts {
  double deliveries = 0.0;
  double wickets = 0.0;
  double extras = 0.0;             // non-wicket wides / no-balls
  std::array<double, 6> runs{};    // non-wicket deliveries by action slot

  double non_wicket() const;
  void add(const DeliveryCounts& other);
  friend bool operator==(const DeliveryCounts&, const DeliveryCounts&) = default;
};

struct ChoiceCounts {
  double observed = 0.0;
  double nonoptimal = 0.0;
  void add(const ChoiceCounts& other) {
    observed += other.observed;
    nonoptimal += other.nonoptimal;
  }
  friend bool operator==(const ChoiceCounts&, const ChoiceCounts&) = default;
};

/// Counts at three levels: exact state, (over, wickets) aggregate, whole innings.
/// Lookups fall back level by level until one holds data.
template <class Counts>
struct FallbackTable {
  std::unordered_map<std::uint32_t, Counts> exact;
  std::vector<Counts> by_over_wickets = std::vector<Counts>(51 * 11);
  Counts global{};

  static std::size_t aggregate_index(const InningsState& s) {
    return static_cast<std::size_t>(s.over) * 11 + static_cast<std::size_t>(s.wickets);
  }

  void add(const InningsState& s, const Counts& c) {
    exact[encode_state(s)].add(c);
    by_over_wickets[aggregate_index(s)].add(c);
    global.add(c);
  }

  void merge(const FallbackTable& other) {
    for (const auto& [k, c] : other.exact) exact[k].add(c);
    for (std::size_t i = 0; i < by_over_wickets.size(); ++i)
      by_over_wickets[i].add(other.by_over_wickets[i]);
    global.add(other.global);
  }

  /// First level for which `has_data` holds; nullptr when none does.
  template <class Pred>
  const Counts* lookup(const InningsState& s, Pred has_data) const {
    if (auto it = exact.find(encode_state(s)); it != exact.end() && has_data(it->second))
      return &it->second;
    if (s.over <= 50 && s.wickets <= 10) {
      const auto& agg = by_over_wickets[aggregate_index(s)];
      if (has_data(agg)) return &agg;
    }
    if (has_data(global)) return &global;
    return nullptr;
  }

  friend bool operator==(const FallbackTable&, const FallbackTable&) = default;
};

/// Per-state transition probabilities resolved through the fallback chain.
struct Transition {
  double wicket_prob = 0.0;
  std::array<double, 6> run_dist{1, 0, 0, 0, 0, 0};  // by action slot, given no wicket
  double extra_prob = 0.0;                           // given no wicket
  double nonoptimal_prob = 0.0;
};

class TransitionModel {
 public:
  explicit TransitionModel(int innings = 1) : innings_(innings) {}

  int innings() const { return innings_; }

  /// Records one observed delivery bowled in `step.state`.
  void record(const StateStep& step);

  /// Model with no visited states whose innings-wide distribution is given.
  static TransitionModel constant(int innings, double wicket_prob,
                                  const std::array<double, 6>& run_dist,
                                  double extra_prob = 0.0);

  Transition resolve(const InningsState& s) const;
  double wicket_prob(const InningsState& s) const { return resolve(s).wicket_prob; }
  std::array<double, 6> run_dist(const InningsState& s) const { return resolve(s).run_dist; }
  double nonoptimal_prob(const InningsState& s) const { return resolve(s).nonoptimal_prob; }
  double visits(const InningsState& s) const;

  FallbackTable<DeliveryCounts>& deliveries() { return deliveries_; }
  const FallbackTable<DeliveryCounts>& deliveries() const { return deliveries_; }
  const std::optional<FallbackTable<ChoiceCounts>>& choices() const { return choices_; }
  void set_choices(FallbackTable<ChoiceCounts> choices) { choices_ = std::move(choices); }

  void merge(const TransitionModel& other);

  friend bool operator==(const TransitionModel&, const TransitionModel&) = default;

 private:
  int innings_;
  FallbackTable<DeliveryCounts> deliveries_;
  std::optional<FallbackTable<ChoiceCounts>> choices_;
};

/// Matches whose innings can drive training, evaluation and estimation: a result
/// was reached and the innings has a positive score.
bool eligible_innings(const Match& match, int innings_no);

/// Empirical transition counts of one innings over the corpus. Parallel map-reduce
/// over fixed match chunks merged in chunk order.
TransitionModel estimate_transitions(const Corpus& corpus, int innings_no);

/// First-innings state-action values and greedy policy over all 336,600 states.
struct QTable {
  std::vector<std::array<double, 6>> q;  // by state index, then action slot
  std::vector<double> v;                 // 0 at terminal states
};

struct PolicyTable {
  std::vector<std::int8_t> action;  // element of kActions per state
  std::vector<double> value;

  int operator()(const InningsState& s) const { return action[encode_state(s)]; }
  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;
};

/// Probability that `runs` lifts the score into the next band, assuming the score
/// sits uniformly inside its current ten-run band.
double band_crossing_prob(int runs);

/// Backward induction over decreasing (over, ball). Q(s,a) = r(s,a)
/// + w V(wicket successor) + (1-w)[e V(extra successor) + (1-e) V(next ball)], with
/// band crossings weighted by band_crossing_prob. Extra-flag self-loops are closed
/// by value iteration to 1e-9. Terminal states carry Q = r, V = 0.
QTable compute_q(const RewardCoefficients& coeffs, const TransitionModel& model);

/// Greedy policy; ties go to the smallest action.
PolicyTable optimal_policy(const QTable& q);

/// Fraction of observed non-wicket first-innings deliveries whose action differs
/// from the policy, with the same fallback levels as the transition counts.
FallbackTable<ChoiceCounts> nonoptimal_rate(const Corpus& corpus, const PolicyTable& policy);

nlohmann::json to_json(const TransitionModel& model);
TransitionModel transition_model_from_json(const nlohmann::json& j);

/// Dense actions and values, plus Q rows of the states listed in `q_states`.
nlohmann::json to_json(const PolicyTable& policy, const QTable* q = nullptr,
                       const std::vector<std::uint32_t>& q_states = {});
PolicyTable policy_from_json(const nlohmann::json& j);

}  // namespace cricket
