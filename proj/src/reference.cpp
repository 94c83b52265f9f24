#include "cricket/reference.hpp"

#include "cricket/errors.hpp"

namespace cricket::reference {

TransitionModel estimate_transitions(const Corpus& corpus, int innings_no) {
  TransitionModel model(innings_no);
  for (const auto& m : corpus.matches) {
    if (!eligible_innings(m, innings_no)) continue;
    for (const auto& step : build_trajectory(m, innings_no)) model.record(step);
  }
  return model;
}

std::vector<FeatureTotals> feature_totals_batch(std::span<const Trajectory> trajectories) {
  std::vector<FeatureTotals> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) out.push_back(feature_totals(t));
  return out;
}

std::vector<int> simulate_scores(const SimulationConfig& config, const TransitionModel& model,
                                 const PolicyTable* policy) {
  detail::check_simulation(config, model, policy);
  const PolicyTable* acting = config.mode == SimMode::Optimal ? policy : nullptr;
  std::vector<int> scores;
  for (int i = 0; i < config.n_sims; ++i) {
    auto rng = make_rng(config.seed, "sim", static_cast<std::uint64_t>(i));
    scores.push_back(simulate_innings(model, acting, config.start, rng).final_score);
  }
  return scores;
}

SimulatorErrorReport simulator_error_report(const Corpus& corpus, int innings_no,
                                            const TransitionModel& model,
                                            const PolicyTable* policy,
                                            const SimulationConfig& config) {
  detail::check_simulation(config, model, policy);
  if (model.innings() != innings_no) throw ConfigError("transition model innings mismatch");
  std::vector<std::optional<MatchError>> per_match;
  std::size_t index = 0;
  for (const auto& m : corpus.matches) {
    if (!eligible_innings(m, innings_no)) continue;
    bool skipped = false;
    auto e = detail::simulate_interrupted(m, innings_no, model, policy, config, index++, skipped);
    per_match.push_back(skipped ? std::nullopt : std::optional<MatchError>(std::move(e)));
  }
  if (per_match.empty()) throw ConfigError("no eligible matches for the simulator report");
  return detail::finish_report(innings_no, config, std::move(per_match));
}

}  // namespace cricket::reference
