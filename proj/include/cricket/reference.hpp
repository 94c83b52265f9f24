#pragma once

#include <span>
#include <vector>

#include "cricket/irl.hpp"
#include "cricket/policy.hpp"
#include "cricket/simulator.hpp"

/// Straight serial versions of the parallel kernels. Tests compare the two for
/// exact equality and the benchmark times them against each other.
namespace cricket::reference {

TransitionModel estimate_transitions(const Corpus& corpus, int innings_no);

std::vector<FeatureTotals> feature_totals_batch(std::span<const Trajectory> trajectories);

std::vector<int> simulate_scores(const SimulationConfig& config, const TransitionModel& model,
                                 const PolicyTable* policy);

SimulatorErrorReport simulator_error_report(const Corpus& corpus, int innings_no,
                                            const TransitionModel& model,
                                            const PolicyTable* policy,
                                            const SimulationConfig& config);

}  // namespace cricket::reference
