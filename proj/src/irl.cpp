#include "cricket/irl.hpp"

#include <algorithm>
#include <cmath>

#include "cricket/errors.hpp"

namespace cricket {

using nlohmann::json;

namespace {
constexpr double kActionScale = 1000.0;
constexpr double kFaceTol = 1e-9;
constexpr std::size_t kCoefficients = 10;
}  // namespace

int action_weight_slot(int action) {
  switch (action) {
    case 0: return -1;
    case 1: return 5;
    case 2: return 6;
    case 3: return 7;
    case 4: return 8;
    case 6: return 9;
    default: throw DomainError("action " + std::to_string(action) + " has no reward weight");
  }
}

double RewardCoefficients::y(int action) const {
  const int slot = action_weight_slot(action);
  if (slot < 0) throw DomainError("dot ball has no action weight");
  return values[static_cast<std::size_t>(slot)];
}

double reward(const InningsState& s, int action, const RewardCoefficients& c) {
  const int slot = action_weight_slot(action);
  double r = c.values[0] * s.over + c.values[1] * s.wickets + c.values[2] * s.score_band +
             c.values[3] * s.ball + c.values[4] * s.extra_flag;
  if (slot >= 0) r += c.values[static_cast<std::size_t>(slot)] * kActionScale * action;
  return r;
}

FeatureTotals feature_totals(std::span<const StateStep> trajectory) {
  FeatureTotals t{};
  for (const auto& step : trajectory) {
    t[0] += step.state.over;
    t[1] += step.state.wickets;
    t[2] += step.state.score_band;
    t[3] += step.state.ball;
    t[4] += step.state.extra_flag;
    const int slot = action_weight_slot(step.action);
    if (slot >= 0) t[static_cast<std::size_t>(slot)] += kActionScale * step.action;
  }
  return t;
}

std::vector<FeatureTotals> feature_totals_batch(std::span<const Trajectory> trajectories) {
  std::vector<FeatureTotals> out(trajectories.size());
  const auto n = static_cast<long>(trajectories.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = feature_totals(trajectories[static_cast<std::size_t>(i)]);
  return out;
}

FeatureTotals mean_totals(std::span<const FeatureTotals> totals) {
  FeatureTotals mean{};
  if (totals.empty()) return mean;
  for (const auto& t : totals)
    for (std::size_t k = 0; k < kCoefficients; ++k) mean[k] += t[k];
  for (double& v : mean) v /= static_cast<double>(totals.size());
  return mean;
}

ExpertPartition partition_expert(const Corpus& corpus) {
  ExpertPartition out;
  for (const auto& m : corpus.matches) {
    if (!m.decided()) {
      ++out.excluded;
      continue;
    }
    Trajectory traj;
    try {
      traj = build_trajectory(m, 1);
    } catch (const DomainError&) {
      ++out.excluded;
      continue;
    }
    (m.winner == m.team_first ? out.expert : out.nonexpert).push_back(std::move(traj));
  }
  return out;
}

double lp_objective(std::span<const Condition> pool, const RewardCoefficients& coeffs) {
  double total = 0.0;
  for (const auto& d : pool) {
    double u = 0.0;
    for (std::size_t k = 0; k < kCoefficients; ++k) u += coeffs.values[k] * d[k];
    total += penalty(u);
  }
  return total;
}

// Columns 0..9 are the coefficients. Condition i adds a shortfall column v_i >= 0
// and a surplus column s_i >= 0 with row  -d_i.c - v_i + s_i = 0; the objective
// sum_i d_i.c - sum_i v_i equals sum_i penalty(d_i.c) at any optimum.
void RewardLp::add_condition(const Condition& d) {
  if (simplex_.columns() == 0) {
    for (std::size_t k = 0; k < kCoefficients; ++k) simplex_.add_column(-1.0, 1.0, true);
    objective_.assign(kCoefficients, 0.0);
  }
  double largest = 0.0;
  for (double v : d) {
    if (!std::isfinite(v)) throw DomainError("non-finite condition component");
    largest = std::max(largest, std::abs(v));
  }
  if (scale_ == 0.0 && largest > 0.0) scale_ = largest;
  const double scale = scale_ > 0.0 ? scale_ : 1.0;

  const std::size_t v = simplex_.add_column(0.0, lp::kInfinity);
  const std::size_t s = simplex_.add_column(0.0, lp::kInfinity);
  std::vector<std::pair<std::size_t, double>> row;
  double u = 0.0;
  for (std::size_t k = 0; k < kCoefficients; ++k) {
    const double dk = d[k] / scale;
    row.emplace_back(k, -dk);
    u += dk * simplex_.value(k);
    objective_[k] += dk;
  }
  row.emplace_back(v, -1.0);
  row.emplace_back(s, 1.0);
  simplex_.add_row(row, 0.0, u >= 0.0 ? s : v);
  objective_.push_back(-1.0);  // v
  objective_.push_back(0.0);   // s
  pool_.push_back(d);
}

LpSolution RewardLp::solve() {
  if (pool_.empty()) throw DomainError("empty condition pool");
  simplex_.set_objective(objective_);
  if (simplex_.maximize() != lp::Status::Optimal)
    throw InternalError("reward LP did not reach an optimum (box constraints make it bounded)");

  // Lexicographic tie-break on a copy, keeping the warm basis of the main problem.
  lp::BoundedSimplex face = simplex_;
  face.fix_to_optimal_face(kFaceTol);
  for (std::size_t k = 0; k < kCoefficients; ++k) {
    std::vector<double> minimize_k(face.columns(), 0.0);
    minimize_k[k] = -1.0;
    face.set_objective(std::move(minimize_k));
    if (face.maximize() != lp::Status::Optimal)
      throw InternalError("tie-break LP did not reach an optimum");
    face.fix_to_optimal_face(kFaceTol);
    face.set_bounds(k, face.value(k), face.value(k));
  }

  LpSolution out;
  for (std::size_t k = 0; k < kCoefficients; ++k)
    out.coeffs.values[k] = std::clamp(face.value(k), -1.0, 1.0);
  out.objective = lp_objective(pool_, out.coeffs);
  out.pivots = simplex_.pivots() + face.pivots();
  return out;
}

LpSolution solve_lp(std::span<const Condition> pool) {
  if (pool.empty()) throw DomainError("empty condition pool");
  RewardLp lp;
  for (const auto& d : pool) lp.add_condition(d);
  return lp.solve();
}

IrlResult run_irl(std::span<const Trajectory> expert, std::span<const Trajectory> nonexpert) {
  IrlResult result;
  result.coeffs = RewardCoefficients::ones();
  if (expert.empty()) throw DomainError("IRL needs at least one expert trajectory");
  if (nonexpert.empty()) {
    result.warnings.push_back("no non-expert trajectories; returning the all-ones initialisation");
    return result;
  }
  const auto expert_totals = feature_totals_batch(expert);
  const FeatureTotals expert_mean = mean_totals(expert_totals);
  const auto nonexpert_totals = feature_totals_batch(nonexpert);

  RewardLp lp;
  for (std::size_t i = 0; i < nonexpert_totals.size(); ++i) {
    const auto& totals = nonexpert_totals[i];
    IrlIteration it;
    it.index = i;
    for (std::size_t k = 0; k < kCoefficients; ++k)
      it.nonexpert_value += result.coeffs.values[k] * totals[k];
    Condition d;
    for (std::size_t k = 0; k < kCoefficients; ++k) d[k] = expert_mean[k] - totals[k];
    lp.add_condition(d);
    const auto solution = lp.solve();
    result.coeffs = solution.coeffs;
    result.objective = solution.objective;
    it.objective = solution.objective;
    it.coeffs = solution.coeffs;
    result.log.push_back(it);
  }
  return result;
}

json to_json(const IrlResult& r) {
  const auto& c = r.coeffs.values;
  json log = json::array();
  for (const auto& it : r.log)
    log.push_back({{"index", it.index},
                   {"nonexpert_value", it.nonexpert_value},
                   {"objective", it.objective}});
  return {{"x", {c[0], c[1], c[2], c[3], c[4]}},
          {"y", {{"1", c[5]}, {"2", c[6]}, {"3", c[7]}, {"4", c[8]}, {"6", c[9]}}},
          {"objective", r.objective},
          {"iterations", r.log.size()},
          {"log", log},
          {"warnings", r.warnings}};
}

RewardCoefficients coefficients_from_json(const json& j) {
  try {
    RewardCoefficients c;
    const auto x = j.at("x").get<std::vector<double>>();
    if (x.size() != 5) throw ParseError("coefficients: x must hold 5 values");
    for (std::size_t k = 0; k < 5; ++k) c.values[k] = x[k];
    const auto& y = j.at("y");
    const char* keys[] = {"1", "2", "3", "4", "6"};
    for (std::size_t k = 0; k < 5; ++k) c.values[5 + k] = y.at(keys[k]).get<double>();
    for (double v : c.values)
      if (!(v >= -1.0 && v <= 1.0)) throw ParseError("coefficients: value outside [-1,1]");
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("coefficients: ") + e.what());
  }
}

}  // namespace cricket
