#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cricket/dls.hpp"
#include "cricket/match_data.hpp"
#include "cricket/random.hpp"
#include "cricket/state_space.hpp"
#include "cricket/value_model.hpp"

namespace cricket {

/// ceil(score / (1 - r)). A quotient within 1e-9 (relative) of an integer is taken
/// as that integer so that exact resource fractions project exactly.
/// Throws SaturationError for r >= 1 and DomainError for r < 0 or score < 0.
std::int64_t predicted_final_score(std::int64_t score, double r);

/// (predicted - actual) / actual * 100. Throws DomainError when actual <= 0.
double percent_error(double predicted, double actual);

struct Interruption {
  std::string match_id;
  int innings_no = 1;
  InningsState state;
  int score_at_interruption = 0;
  int actual_final_score = 0;
};

/// Uniform draw among the trajectory steps bowled in over 20 or later, with the
/// runs scored before that step. nullopt when the innings never got that far.
std::optional<Interruption> make_interruption(const Match& match, int innings_no, Rng& rng);

inline constexpr int kFolds = 10;

struct MethodFold {
  double mean_error_pct = 0.0;
  std::size_t n = 0;
};

struct FoldResult {
  int fold = 0;
  MethodFold model;
  MethodFold dls;
  std::size_t test_matches = 0;
  std::size_t skipped = 0;     // innings too short to interrupt
  std::size_t degenerate = 0;  // interrupted at score 0
  double training_mse = 0.0;
};

/// One scored interruption, kept so the errors can be re-aggregated.
struct InterruptionRecord {
  int fold = 0;
  Interruption interruption;
  double model_r = 0.0;
  double dls_r = 0.0;
  std::int64_t model_prediction = 0;
  std::int64_t dls_prediction = 0;
  double model_error_pct = 0.0;
  double dls_error_pct = 0.0;
};

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation of the fold means
};

struct FoldReport {
  int innings_no = 1;
  std::uint64_t seed = 0;
  NetworkConfig network;
  std::vector<FoldResult> folds;
  SummaryStats model;
  SummaryStats dls;
  std::vector<InterruptionRecord> records;
};

/// Ten-fold comparison of the value network against the resource table. Folds come
/// from a seeded shuffle of the eligible matches split into contiguous blocks; the
/// network of each fold trains on the other nine. Folds run in parallel and the
/// report is identical for any thread count. Throws ConfigError with fewer than ten
/// eligible matches or a network width that does not fit the innings.
FoldReport cross_validate(const Corpus& corpus, const NetworkConfig& network,
                          const DlsTable& dls, int innings_no, std::uint64_t seed);

/// Fold membership: element i lists the indices (into `n` eligible matches) of fold i.
std::vector<std::vector<std::size_t>> assign_folds(std::size_t n, std::uint64_t seed);

/// Mean and sample standard deviation (0 for fewer than two values).
SummaryStats summarize(const std::vector<double>& values);

nlohmann::json to_json(const FoldReport& report);
/// `fold,method,mean_error_pct,n` rows.
std::string fold_csv(const FoldReport& report);

}  // namespace cricket
