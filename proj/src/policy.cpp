#include "cricket/policy.hpp"

#include <algorithm>
#include <cmath>

#include "cricket/errors.hpp"

namespace cricket {

using nlohmann::json;

namespace {

// Upper bound on the extra probability used by the DP. A state seen only with
// extras would otherwise loop on itself forever.
constexpr double kMaxExtraProb = 0.95;
constexpr double kLoopTol = 1e-9;
constexpr std::size_t kChunks = 64;

}  // namespace

double DeliveryCounts::non_wicket() const {
  double n = 0.0;
  for (double r : runs) n += r;
  return n;
}

void DeliveryCounts::add(const DeliveryCounts& o) {
  deliveries += o.deliveries;
  wickets += o.wickets;
  extras += o.extras;
  for (std::size_t k = 0; k < runs.size(); ++k) runs[k] += o.runs[k];
}

void TransitionModel::record(const StateStep& step) {
  if (step.state.innings() != innings_)
    throw DomainError("state of innings " + std::to_string(step.state.innings()) +
                      " recorded into an innings " + std::to_string(innings_) + " model");
  DeliveryCounts c;
  c.deliveries = 1.0;
  if (step.wicket) {
    c.wickets = 1.0;
  } else {
    c.extras = step.extra ? 1.0 : 0.0;
    c.runs[static_cast<std::size_t>(action_slot(step.runs))] = 1.0;
  }
  deliveries_.add(step.state, c);
}

TransitionModel TransitionModel::constant(int innings, double wicket_prob,
                                          const std::array<double, 6>& run_dist,
                                          double extra_prob) {
  double total = 0.0;
  for (double p : run_dist) {
    if (p < 0.0) throw DomainError("negative run probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("run distribution must sum to 1");
  if (wicket_prob < 0.0 || wicket_prob > 1.0 || extra_prob < 0.0 || extra_prob > 1.0)
    throw DomainError("probabilities must lie in [0,1]");
  TransitionModel m(innings);
  auto& g = m.deliveries_.global;
  g.deliveries = 1.0;
  g.wickets = wicket_prob;
  g.extras = extra_prob * (1.0 - wicket_prob);
  for (std::size_t k = 0; k < 6; ++k) g.runs[k] = run_dist[k] * (1.0 - wicket_prob);
  return m;
}

Transition TransitionModel::resolve(const InningsState& s) const {
  Transition t;
  if (const auto* c = deliveries_.lookup(s, [](const DeliveryCounts& c) { return c.deliveries > 0; }))
    t.wicket_prob = c->wickets / c->deliveries;
  if (const auto* c = deliveries_.lookup(s, [](const DeliveryCounts& c) { return c.non_wicket() > 0; })) {
    const double n = c->non_wicket();
    for (std::size_t k = 0; k < 6; ++k) t.run_dist[k] = c->runs[k] / n;
    t.extra_prob = c->extras / n;
  }
  if (choices_) {
    if (const auto* c = choices_->lookup(s, [](const ChoiceCounts& c) { return c.observed > 0; }))
      t.nonoptimal_prob = c->nonoptimal / c->observed;
  }
  return t;
}

double TransitionModel::visits(const InningsState& s) const {
  const auto it = deliveries_.exact.find(encode_state(s));
  return it == deliveries_.exact.end() ? 0.0 : it->second.deliveries;
}

void TransitionModel::merge(const TransitionModel& other) {
  if (other.innings_ != innings_) throw DomainError("cannot merge models of different innings");
  deliveries_.merge(other.deliveries_);
  if (other.choices_) {
    if (!choices_) choices_.emplace();
    choices_->merge(*other.choices_);
  }
}

bool eligible_innings(const Match& match, int innings_no) {
  return match.winner != kNoResult && match.has_innings(innings_no) && match.score(innings_no) > 0;
}

TransitionModel estimate_transitions(const Corpus& corpus, int innings_no) {
  std::vector<const Match*> matches;
  for (const auto& m : corpus.matches)
    if (eligible_innings(m, innings_no)) matches.push_back(&m);

  std::vector<TransitionModel> partial(kChunks, TransitionModel(innings_no));
  const auto chunks = static_cast<long>(kChunks);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < chunks; ++c) {
    const std::size_t begin = matches.size() * static_cast<std::size_t>(c) / kChunks;
    const std::size_t end = matches.size() * static_cast<std::size_t>(c + 1) / kChunks;
    auto& local = partial[static_cast<std::size_t>(c)];
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& step : build_trajectory(*matches[i], innings_no)) local.record(step);
  }
  TransitionModel model(innings_no);
  for (const auto& p : partial) model.merge(p);
  return model;
}

double band_crossing_prob(int runs) { return std::min(runs, 10) / 10.0; }

QTable compute_q(const RewardCoefficients& coeffs, const TransitionModel& model) {
  if (model.innings() != 1) throw DomainError("optimal policy is defined for the first innings only");
  QTable table;
  table.q.assign(kFirstInningsStates, {});
  table.v.assign(kFirstInningsStates, 0.0);

  auto value_at = [&](int over, int wickets, int band, int ball, int flag) {
    InningsState s{over, wickets, band, ball, flag, std::nullopt};
    if (s.terminal()) return 0.0;
    return table.v[encode_state(s)];
  };

  // Terminal states: immediate reward only.
  for (std::uint32_t idx = 0; idx < kFirstInningsStates; ++idx) {
    const auto s = decode_state(idx, 1);
    if (!s.terminal()) continue;
    for (std::size_t k = 0; k < kActions.size(); ++k) table.q[idx][k] = reward(s, kActions[k], coeffs);
  }

  std::array<double, 6> base{};
  std::array<double, 6> loop{};
  for (int pos = kOvers * kBallsPerOver - 1; pos >= 0; --pos) {
    const int over = pos / kBallsPerOver;
    const int ball = pos % kBallsPerOver;
    const int next_over = (pos + 1) / kBallsPerOver;
    const int next_ball = (pos + 1) % kBallsPerOver;
    for (int wickets = 0; wickets < kWickets; ++wickets) {
      for (int band = kBands - 1; band >= 0; --band) {
        const int band_up = std::min(band + 1, kBands - 1);
        for (int flag = 1; flag >= 0; --flag) {
          const InningsState s{over, wickets, band, ball, flag, std::nullopt};
          const auto t = model.resolve(s);
          const double w = t.wicket_prob;
          const double e = std::min(t.extra_prob, kMaxExtraProb);
          const double v_wicket = value_at(next_over, wickets + 1, band, next_ball, 0);
          // Extra successors share the position and carry flag 1; the flag-1 state
          // of this band is `s` itself when flag == 1.
          const double v_extra_up = value_at(over, wickets, band_up, ball, 1);
          const double v_extra_stay = flag == 1 ? 0.0 : value_at(over, wickets, band, ball, 1);
          for (std::size_t k = 0; k < kActions.size(); ++k) {
            const int a = kActions[k];
            const double p = band == band_up ? 0.0 : band_crossing_prob(a);
            const double v_next = (1.0 - p) * value_at(next_over, wickets, band, next_ball, 0) +
                                  p * value_at(next_over, wickets, band_up, next_ball, 0);
            double extra_part = p * v_extra_up;
            double self = 0.0;
            if (flag == 1)
              self = (1.0 - w) * e * (1.0 - p);
            else
              extra_part += (1.0 - p) * v_extra_stay;
            base[k] = reward(s, a, coeffs) + w * v_wicket + (1.0 - w) * ((1.0 - e) * v_next + e * extra_part);
            loop[k] = self;
          }
          const auto idx = encode_state(s);
          double v = *std::max_element(base.begin(), base.end());
          if (flag == 1) {
            for (int iter = 0; iter < 100000; ++iter) {
              double next = -std::numeric_limits<double>::infinity();
              for (std::size_t k = 0; k < 6; ++k) next = std::max(next, base[k] + loop[k] * v);
              const double delta = std::abs(next - v);
              v = next;
              if (delta <= kLoopTol * std::max(1.0, std::abs(v))) break;
            }
          }
          for (std::size_t k = 0; k < 6; ++k) table.q[idx][k] = base[k] + loop[k] * v;
          v = *std::max_element(table.q[idx].begin(), table.q[idx].end());
          if (!std::isfinite(v)) throw InternalError("non-finite value at state " + to_string(s));
          table.v[idx] = v;
        }
      }
    }
  }
  return table;
}

PolicyTable optimal_policy(const QTable& q) {
  PolicyTable p;
  p.action.resize(q.q.size());
  p.value = q.v;
  for (std::size_t i = 0; i < q.q.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 6; ++k)
      if (q.q[i][k] > q.q[i][best]) best = k;
    p.action[i] = static_cast<std::int8_t>(kActions[best]);
  }
  return p;
}

FallbackTable<ChoiceCounts> nonoptimal_rate(const Corpus& corpus, const PolicyTable& policy) {
  FallbackTable<ChoiceCounts> table;
  for (const auto& m : corpus.matches) {
    if (!eligible_innings(m, 1)) continue;
    for (const auto& step : build_trajectory(m, 1)) {
      if (step.wicket) continue;
      table.add(step.state, {1.0, step.action != policy(step.state) ? 1.0 : 0.0});
    }
  }
  return table;
}

namespace {

json counts_json(const DeliveryCounts& c) {
  json row = {c.deliveries, c.wickets, c.extras};
  for (double r : c.runs) row.push_back(r);
  return row;
}

DeliveryCounts counts_from(const json& row, std::size_t offset = 0) {
  if (!row.is_array() || row.size() != offset + 9) throw ParseError("transition counts: bad row");
  DeliveryCounts c;
  c.deliveries = row[offset].get<double>();
  c.wickets = row[offset + 1].get<double>();
  c.extras = row[offset + 2].get<double>();
  for (std::size_t k = 0; k < 6; ++k) c.runs[k] = row[offset + 3 + k].get<double>();
  return c;
}

template <class Counts, class ToJson>
json table_json(const FallbackTable<Counts>& t, ToJson to) {
  std::vector<std::uint32_t> keys;
  for (const auto& [k, c] : t.exact) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  json exact = json::array();
  for (auto k : keys) {
    json row = {k};
    for (const auto& v : to(t.exact.at(k))) row.push_back(v);
    exact.push_back(row);
  }
  json agg = json::array();
  for (const auto& c : t.by_over_wickets) agg.push_back(to(c));
  return {{"exact", exact}, {"by_over_wickets", agg}, {"global", to(t.global)}};
}

template <class Counts, class FromJson>
FallbackTable<Counts> table_from(const json& j, FromJson from) {
  FallbackTable<Counts> t;
  for (const auto& row : j.at("exact")) {
    json rest(row.begin() + 1, row.end());
    t.exact[row.at(0).get<std::uint32_t>()] = from(rest);
  }
  const auto& agg = j.at("by_over_wickets");
  if (agg.size() != t.by_over_wickets.size()) throw ParseError("aggregate table has wrong size");
  for (std::size_t i = 0; i < agg.size(); ++i) t.by_over_wickets[i] = from(agg[i]);
  t.global = from(j.at("global"));
  return t;
}

json choice_json(const ChoiceCounts& c) { return {c.observed, c.nonoptimal}; }
ChoiceCounts choice_from(const json& row) {
  if (!row.is_array() || row.size() != 2) throw ParseError("choice counts: bad row");
  return {row[0].get<double>(), row[1].get<double>()};
}

}  // namespace

json to_json(const TransitionModel& model) {
  json j = {{"innings", model.innings()},
            {"deliveries", table_json(model.deliveries(), counts_json)},
            {"choices", nullptr}};
  if (model.choices()) j["choices"] = table_json(*model.choices(), choice_json);
  return j;
}

TransitionModel transition_model_from_json(const json& j) {
  try {
    TransitionModel m(j.at("innings").get<int>());
    m.deliveries() = table_from<DeliveryCounts>(j.at("deliveries"),
                                                [](const json& r) { return counts_from(r); });
    if (!j.at("choices").is_null())
      m.set_choices(table_from<ChoiceCounts>(j.at("choices"), choice_from));
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("transitions: ") + e.what());
  }
}

json to_json(const PolicyTable& policy, const QTable* q, const std::vector<std::uint32_t>& q_states) {
  json j = {{"states", policy.action.size()}, {"action", policy.action}, {"value", policy.value}};
  if (q != nullptr) {
    json rows = json::object();
    for (auto idx : q_states) rows[std::to_string(idx)] = q->q.at(idx);
    j["q"] = rows;
  }
  return j;
}

PolicyTable policy_from_json(const json& j) {
  try {
    PolicyTable p;
    p.action = j.at("action").get<std::vector<std::int8_t>>();
    p.value = j.at("value").get<std::vector<double>>();
    if (p.action.size() != kFirstInningsStates || p.value.size() != kFirstInningsStates)
      throw ParseError("policy must cover all first-innings states");
    for (auto a : p.action)
      if (std::find(kActions.begin(), kActions.end(), a) == kActions.end())
        throw ParseError("policy holds an invalid action");
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("policy: ") + e.what());
  }
}

}  // namespace cricket
