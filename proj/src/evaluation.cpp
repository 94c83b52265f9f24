#include "cricket/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cricket/errors.hpp"
#include "cricket/policy.hpp"

namespace cricket {

using nlohmann::json;

std::int64_t predicted_final_score(std::int64_t score, double r) {
  if (score < 0) throw DomainError("negative score at interruption");
  if (!(r >= 0.0)) throw DomainError("resources left must be non-negative");
  if (r >= 1.0) throw SaturationError("no scoring resources used: r >= 1");
  const double q = static_cast<double>(score) / (1.0 - r);
  if (q > 9.0e15) throw SaturationError("projection overflows: r too close to 1");
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(q));
}

double percent_error(double predicted, double actual) {
  if (!(actual > 0.0)) throw DomainError("actual score must be positive");
  return (predicted - actual) / actual * 100.0;
}

std::optional<Interruption> make_interruption(const Match& match, int innings_no, Rng& rng) {
  if (!match.has_innings(innings_no) || match.score(innings_no) <= 0) return std::nullopt;
  const auto trajectory = build_trajectory(match, innings_no);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < trajectory.size(); ++i)
    if (trajectory[i].state.over >= 20) eligible.push_back(i);
  if (eligible.empty()) return std::nullopt;
  const std::size_t pick = eligible[uniform_index(rng, eligible.size())];
  int scored = 0;
  for (std::size_t i = 0; i < pick; ++i) scored += trajectory[i].runs;
  return Interruption{match.match_id, innings_no, trajectory[pick].state, scored,
                      match.score(innings_no)};
}

std::vector<std::vector<std::size_t>> assign_folds(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, "cv-folds");
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  std::vector<std::vector<std::size_t>> folds(kFolds);
  for (std::size_t f = 0; f < kFolds; ++f)
    folds[f].assign(order.begin() + static_cast<long>(n * f / kFolds),
                    order.begin() + static_cast<long>(n * (f + 1) / kFolds));
  return folds;
}

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

FoldReport cross_validate(const Corpus& corpus, const NetworkConfig& network, const DlsTable& dls,
                          int innings_no, std::uint64_t seed) {
  if (innings_no != 1 && innings_no != 2) throw ConfigError("innings must be 1 or 2");
  const int width = innings_no == 1 ? 5 : 6;
  if (network.input_width != width)
    throw ConfigError("innings " + std::to_string(innings_no) + " needs input width " +
                      std::to_string(width));
  std::vector<const Match*> eligible;
  for (const auto& m : corpus.matches)
    if (eligible_innings(m, innings_no)) eligible.push_back(&m);
  if (eligible.size() < static_cast<std::size_t>(kFolds))
    throw ConfigError("cross-validation needs at least 10 eligible matches, got " +
                      std::to_string(eligible.size()));

  std::vector<std::vector<StateStep>> trajectories(eligible.size());
  for (std::size_t i = 0; i < eligible.size(); ++i)
    trajectories[i] = build_trajectory(*eligible[i], innings_no);

  const auto folds = assign_folds(eligible.size(), seed);
  FoldReport report;
  report.innings_no = innings_no;
  report.seed = seed;
  report.network = network;
  report.folds.resize(kFolds);
  std::vector<std::vector<InterruptionRecord>> fold_records(kFolds);

#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < kFolds; ++f) {
    const auto& test = folds[static_cast<std::size_t>(f)];
    std::vector<McSample> samples;
    for (int g = 0; g < kFolds; ++g) {
      if (g == f) continue;
      for (std::size_t i : folds[static_cast<std::size_t>(g)]) {
        auto s = mc_targets(trajectories[i], eligible[i]->score(innings_no));
        samples.insert(samples.end(), std::make_move_iterator(s.begin()),
                       std::make_move_iterator(s.end()));
      }
    }
    auto [net, training] = train(network, samples);

    FoldResult& result = report.folds[static_cast<std::size_t>(f)];
    result.fold = f;
    result.test_matches = test.size();
    result.training_mse = training.final_mse;
    double model_sum = 0.0, dls_sum = 0.0;
    for (std::size_t j = 0; j < test.size(); ++j) {
      auto rng = make_rng(seed, "interrupt", j);
      const auto cut = make_interruption(*eligible[test[j]], innings_no, rng);
      if (!cut) {
        ++result.skipped;
        continue;
      }
      if (cut->score_at_interruption == 0) {
        ++result.degenerate;
        continue;
      }
      InterruptionRecord rec;
      rec.fold = f;
      rec.interruption = *cut;
      rec.model_r = net.predict(cut->state);
      rec.dls_r = dls.resources_left(kOvers - cut->state.over, cut->state.wickets);
      rec.model_prediction = predicted_final_score(cut->score_at_interruption, rec.model_r);
      rec.dls_prediction = predicted_final_score(cut->score_at_interruption, rec.dls_r);
      rec.model_error_pct = percent_error(static_cast<double>(rec.model_prediction), cut->actual_final_score);
      rec.dls_error_pct = percent_error(static_cast<double>(rec.dls_prediction), cut->actual_final_score);
      model_sum += rec.model_error_pct;
      dls_sum += rec.dls_error_pct;
      fold_records[static_cast<std::size_t>(f)].push_back(std::move(rec));
    }
    const std::size_t n = fold_records[static_cast<std::size_t>(f)].size();
    result.model = {n ? model_sum / static_cast<double>(n) : 0.0, n};
    result.dls = {n ? dls_sum / static_cast<double>(n) : 0.0, n};
  }

  std::vector<double> model_means, dls_means;
  for (std::size_t f = 0; f < kFolds; ++f) {
    if (report.folds[f].model.n > 0) {
      model_means.push_back(report.folds[f].model.mean_error_pct);
      dls_means.push_back(report.folds[f].dls.mean_error_pct);
    }
    for (auto& rec : fold_records[f]) report.records.push_back(std::move(rec));
  }
  report.model = summarize(model_means);
  report.dls = summarize(dls_means);
  return report;
}

json to_json(const FoldReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"fold", f.fold},
                     {"model", {{"mean_error_pct", f.model.mean_error_pct}, {"n", f.model.n}}},
                     {"dls", {{"mean_error_pct", f.dls.mean_error_pct}, {"n", f.dls.n}}},
                     {"test_matches", f.test_matches},
                     {"skipped", f.skipped},
                     {"degenerate", f.degenerate},
                     {"training_mse", f.training_mse}});
  json records = json::array();
  for (const auto& rec : r.records) {
    const auto& s = rec.interruption.state;
    records.push_back({{"fold", rec.fold},
                       {"match_id", rec.interruption.match_id},
                       {"over", s.over},
                       {"ball", s.ball},
                       {"wickets", s.wickets},
                       {"score", rec.interruption.score_at_interruption},
                       {"actual", rec.interruption.actual_final_score},
                       {"model_r", rec.model_r},
                       {"dls_r", rec.dls_r},
                       {"model_prediction", rec.model_prediction},
                       {"dls_prediction", rec.dls_prediction},
                       {"model_error_pct", rec.model_error_pct},
                       {"dls_error_pct", rec.dls_error_pct}});
  }
  return {{"innings", r.innings_no},
          {"seed", r.seed},
          {"network", to_json(r.network)},
          {"folds", folds},
          {"summary",
           {{"model", {{"mean", r.model.mean}, {"std", r.model.std}}},
            {"dls", {{"mean", r.dls.mean}, {"std", r.dls.std}}}}},
          {"records", records}};
}

std::string fold_csv(const FoldReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "fold,method,mean_error_pct,n\n";
  for (const auto& f : r.folds) {
    out << f.fold << ",model," << f.model.mean_error_pct << ',' << f.model.n << '\n';
    out << f.fold << ",dls," << f.dls.mean_error_pct << ',' << f.dls.n << '\n';
  }
  return out.str();
}

}  // namespace cricket
