#include "cricket/simulator.hpp"

#include <cmath>
#include <sstream>

#include "cricket/errors.hpp"
#include "cricket/evaluation.hpp"

namespace cricket {

using nlohmann::json;

std::string to_string(SimMode mode) { return mode == SimMode::Optimal ? "optimal" : "behavioral"; }

SimMode sim_mode_from_string(const std::string& text) {
  if (text == "behavioral") return SimMode::Behavioral;
  if (text == "optimal") return SimMode::Optimal;
  throw ConfigError("unknown simulation mode '" + text + "'");
}

InningsState SimStart::state() const {
  InningsState s{over, wickets, score_band(score), ball, extra_flag, std::nullopt};
  if (target) s.target_band = score_band(*target);
  return s;
}

SimStart SimStart::from_state(const InningsState& s, int score, std::optional<int> target) {
  return {s.over, s.ball, s.wickets, score, s.extra_flag, target};
}

namespace {

int sample_runs(const std::array<double, 6>& dist, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist[k] <= 0.0) continue;
    acc += dist[k];
    last = k;
    if (u < acc) return kActions[k];
  }
  return kActions[last];
}

void check_start(const SimStart& start) {
  if (start.over < 0 || start.over > kOvers || start.ball < 0 || start.ball >= kBallsPerOver ||
      start.wickets < 0 || start.wickets > kWickets || start.score < 0 || start.extra_flag < 0 ||
      start.extra_flag > 1 || (start.target && *start.target < 0))
    throw DomainError("invalid simulation start");
}

bool innings_over(int over, int wickets, int score, const std::optional<int>& target) {
  return over >= kOvers || wickets >= kWickets || (target && score > *target);
}

}  // namespace

SimulatedInnings simulate_innings(const TransitionModel& model, const PolicyTable* policy,
                                  const SimStart& start, Rng& rng, bool keep_trajectory) {
  check_start(start);
  if (model.innings() != start.innings())
    throw DomainError("transition model and start belong to different innings");
  if (policy != nullptr && start.innings() != 1)
    throw DomainError("policies act in the first innings only");
  int over = start.over, ball = start.ball, wickets = start.wickets, score = start.score;
  int flag = start.extra_flag;
  const std::optional<int> target_band =
      start.target ? std::optional<int>(score_band(*start.target)) : std::nullopt;
  SimulatedInnings out;
  while (!innings_over(over, wickets, score, start.target)) {
    const InningsState s{over, wickets, score_band(score), ball, flag, target_band};
    const auto t = model.resolve(s);
    StateStep step{s, 0, false, 0, false};
    if (uniform01(rng) < t.wicket_prob) {
      step.wicket = true;
      ++wickets;
    } else {
      if (policy != nullptr && uniform01(rng) < 1.0 - t.nonoptimal_prob)
        step.action = (*policy)(s);
      else
        step.action = sample_runs(t.run_dist, rng);
      step.runs = step.action;
      score += step.runs;
    }
    if (keep_trajectory) out.trajectory.push_back(step);
    flag = 0;
    if (++ball == kBallsPerOver) {
      ball = 0;
      ++over;
    }
    ++out.balls;
  }
  out.final_score = score;
  out.wickets = wickets;
  return out;
}

MatchOutcome simulate_match(const TransitionModel& model_1, const TransitionModel& model_2,
                            const PolicyTable* policy, std::uint64_t seed, std::uint64_t index) {
  auto rng_1 = make_rng(seed, "match-first", index);
  auto rng_2 = make_rng(seed, "match-second", index);
  MatchOutcome m;
  m.score_1 = simulate_innings(model_1, policy, SimStart{}, rng_1).final_score;
  SimStart chase;
  chase.target = m.score_1;
  m.score_2 = simulate_innings(model_2, nullptr, chase, rng_2).final_score;
  m.winner = m.score_1 > m.score_2 ? 1 : (m.score_2 > m.score_1 ? 2 : 0);
  return m;
}

ScoreDistribution distribution_from_scores(const std::vector<int>& scores) {
  ScoreDistribution d;
  d.n = scores.size();
  if (scores.empty()) return d;
  for (int s : scores) ++d.histogram[s];
  for (const auto& [score, count] : d.histogram) d.mean += static_cast<double>(score) * count;
  d.mean /= static_cast<double>(d.n);
  double ss = 0.0;
  for (const auto& [score, count] : d.histogram) ss += (score - d.mean) * (score - d.mean) * count;
  d.std = std::sqrt(ss / static_cast<double>(d.n));
  return d;
}

namespace detail {

void check_simulation(const SimulationConfig& config, const TransitionModel& model,
                      const PolicyTable* policy) {
  if (config.n_sims <= 0) throw ConfigError("n_sims must be positive");
  if (config.mode == SimMode::Optimal) {
    if (policy == nullptr) throw ConfigError("optimal mode requires a policy");
    if (model.innings() != 1) throw ConfigError("optimal mode is defined for the first innings only");
  }
}

MatchError simulate_interrupted(const Match& match, int innings_no, const TransitionModel& model,
                                const PolicyTable* policy, const SimulationConfig& config,
                                std::size_t match_index, bool& skipped) {
  auto cut_rng = make_rng(config.seed, "interrupt", match_index);
  const auto cut = make_interruption(match, innings_no, cut_rng);
  skipped = !cut;
  if (!cut) return {};
  const std::optional<int> target =
      innings_no == 2 ? std::optional<int>(match.score(1)) : std::nullopt;
  const auto start = SimStart::from_state(cut->state, cut->score_at_interruption, target);
  const PolicyTable* acting = config.mode == SimMode::Optimal ? policy : nullptr;
  const std::uint64_t sims_seed = derive_seed(config.seed, "match-sims", match_index);
  double total = 0.0;
  for (int i = 0; i < config.n_sims; ++i) {
    auto rng = make_rng(sims_seed, "sim", static_cast<std::uint64_t>(i));
    total += simulate_innings(model, acting, start, rng).final_score;
  }
  MatchError e;
  e.match_id = match.match_id;
  e.state = cut->state;
  e.score_at_interruption = cut->score_at_interruption;
  e.actual = cut->actual_final_score;
  e.simulated_mean = total / config.n_sims;
  e.error_pct = percent_error(e.simulated_mean, e.actual);
  return e;
}

SimulatorErrorReport finish_report(int innings_no, const SimulationConfig& config,
                                   std::vector<std::optional<MatchError>> per_match) {
  SimulatorErrorReport r;
  r.innings_no = innings_no;
  r.mode = config.mode;
  r.n_sims = config.n_sims;
  r.seed = config.seed;
  std::vector<double> errors;
  for (auto& e : per_match) {
    if (!e) {
      ++r.skipped;
      continue;
    }
    errors.push_back(e->error_pct);
    r.matches.push_back(std::move(*e));
  }
  const auto stats = summarize(errors);
  r.mean_error_pct = stats.mean;
  r.std_error_pct = stats.std;
  return r;
}

}  // namespace detail

std::vector<int> simulate_scores(const SimulationConfig& config, const TransitionModel& model,
                                 const PolicyTable* policy) {
  detail::check_simulation(config, model, policy);
  const PolicyTable* acting = config.mode == SimMode::Optimal ? policy : nullptr;
  std::vector<int> scores(static_cast<std::size_t>(config.n_sims));
  const long n = config.n_sims;
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) {
    auto rng = make_rng(config.seed, "sim", static_cast<std::uint64_t>(i));
    scores[static_cast<std::size_t>(i)] =
        simulate_innings(model, acting, config.start, rng).final_score;
  }
  return scores;
}

ScoreDistribution posterior_distribution(const SimulationConfig& config,
                                         const TransitionModel& model, const PolicyTable* policy) {
  return distribution_from_scores(simulate_scores(config, model, policy));
}

SimulatorErrorReport simulator_error_report(const Corpus& corpus, int innings_no,
                                            const TransitionModel& model,
                                            const PolicyTable* policy,
                                            const SimulationConfig& config) {
  detail::check_simulation(config, model, policy);
  if (model.innings() != innings_no) throw ConfigError("transition model innings mismatch");
  std::vector<const Match*> eligible;
  for (const auto& m : corpus.matches)
    if (eligible_innings(m, innings_no)) eligible.push_back(&m);
  if (eligible.empty()) throw ConfigError("no eligible matches for the simulator report");

  std::vector<std::optional<MatchError>> per_match(eligible.size());
  const auto n = static_cast<long>(eligible.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    bool skipped = false;
    auto e = detail::simulate_interrupted(*eligible[k], innings_no, model, policy, config, k, skipped);
    if (!skipped) per_match[k] = std::move(e);
  }
  return detail::finish_report(innings_no, config, std::move(per_match));
}

namespace {

int play_synthetic(const TransitionModel& model, int innings_no, std::optional<int> target,
                   Rng& rng, bool extras, std::vector<Delivery>& out) {
  int over = 0, ball = 0, wickets = 0, score = 0, flag = 0;
  const std::optional<int> target_band =
      target ? std::optional<int>(score_band(*target)) : std::nullopt;
  while (!innings_over(over, wickets, score, target)) {
    const InningsState s{over, wickets, score_band(score), ball, flag, target_band};
    const auto t = model.resolve(s);
    Delivery d{innings_no, over, ball, 0, false, false};
    if (uniform01(rng) < t.wicket_prob) {
      d.is_wicket = true;
      ++wickets;
    } else {
      d.runs_batted = sample_runs(t.run_dist, rng);
      d.is_extra = extras && uniform01(rng) < t.extra_prob;
      score += d.runs_batted;
    }
    out.push_back(d);
    if (d.is_extra) {
      flag = 1;
      continue;
    }
    flag = 0;
    if (++ball == kBallsPerOver) {
      ball = 0;
      ++over;
    }
  }
  return score;
}

}  // namespace

Match synthesize_match(const TransitionModel& model_1, const TransitionModel& model_2,
                       std::uint64_t seed, std::uint64_t index, bool extras) {
  if (model_1.innings() != 1 || model_2.innings() != 2)
    throw DomainError("synthesize_match needs a first- and a second-innings model");
  Match m;
  m.match_id = "synthetic-" + std::to_string(index);
  m.team_first = "Team 1";
  m.team_second = "Team 2";
  auto rng_1 = make_rng(seed, "synth-first", index);
  auto rng_2 = make_rng(seed, "synth-second", index);
  const int s1 = play_synthetic(model_1, 1, std::nullopt, rng_1, extras, m.deliveries);
  const int s2 = play_synthetic(model_2, 2, s1, rng_2, extras, m.deliveries);
  m.winner = s1 > s2 ? m.team_first : (s2 > s1 ? m.team_second : std::string(kTie));
  finalize_match(m);
  return m;
}

json to_json(const ScoreDistribution& d, SimMode mode) {
  json hist = json::array();
  for (const auto& [score, count] : d.histogram) hist.push_back({score, count});
  return {{"mean", d.mean}, {"std", d.std}, {"n", d.n}, {"mode_flag", to_string(mode)},
          {"histogram", hist}};
}

ScoreDistribution distribution_from_json(const json& j) {
  try {
    ScoreDistribution d;
    d.mean = j.at("mean").get<double>();
    d.std = j.at("std").get<double>();
    d.n = j.at("n").get<std::size_t>();
    std::size_t total = 0;
    for (const auto& row : j.at("histogram")) {
      const auto count = row.at(1).get<std::size_t>();
      d.histogram[row.at(0).get<int>()] = count;
      total += count;
    }
    if (total != d.n) throw ParseError("distribution: histogram counts do not sum to n");
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("distribution: ") + e.what());
  }
}

std::string distribution_csv(const ScoreDistribution& d) {
  std::ostringstream out;
  out << "final_score,count\n";
  for (const auto& [score, count] : d.histogram) out << score << ',' << count << '\n';
  return out.str();
}

json to_json(const SimulatorErrorReport& r) {
  json matches = json::array();
  for (const auto& m : r.matches)
    matches.push_back({{"match_id", m.match_id},
                       {"over", m.state.over},
                       {"ball", m.state.ball},
                       {"wickets", m.state.wickets},
                       {"score", m.score_at_interruption},
                       {"actual", m.actual},
                       {"simulated_mean", m.simulated_mean},
                       {"error_pct", m.error_pct}});
  return {{"innings", r.innings_no},
          {"mode", to_string(r.mode)},
          {"n_sims", r.n_sims},
          {"seed", r.seed},
          {"mean_error_pct", r.mean_error_pct},
          {"std_error_pct", r.std_error_pct},
          {"skipped", r.skipped},
          {"matches", matches}};
}

}  // namespace cricket
