// Times each parallel kernel against its serial reference on a synthetic corpus
// and checks that both produce the same result.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "cricket/irl.hpp"
#include "cricket/policy.hpp"
#include "cricket/reference.hpp"
#include "cricket/simulator.hpp"

using namespace cricket;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-26s serial %8.3f s  parallel %8.3f s  speedup %5.2fx  %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int n_matches = argc > 1 ? std::atoi(argv[1]) : 2000;
  std::printf("threads %d, matches %d\n", omp_get_max_threads(), n_matches);
  const std::array<double, 6> dist{0.4, 0.33, 0.1, 0.02, 0.11, 0.04};
  const auto m1 = TransitionModel::constant(1, 0.025, dist, 0.03);
  const auto m2 = TransitionModel::constant(2, 0.025, dist, 0.03);
  Corpus corpus;
  for (int i = 0; i < n_matches; ++i)
    corpus.matches.push_back(synthesize_match(m1, m2, 7, static_cast<std::uint64_t>(i), true));

  TransitionModel a, b;
  const double t_ser = seconds([&] { a = reference::estimate_transitions(corpus, 1); });
  const double t_par = seconds([&] { b = estimate_transitions(corpus, 1); });
  row("estimate_transitions", t_ser, t_par, a == b);

  std::vector<Trajectory> trajectories;
  for (const auto& m : corpus.matches) trajectories.push_back(build_trajectory(m, 1));
  std::vector<FeatureTotals> fa, fb;
  const double f_ser = seconds([&] { fa = reference::feature_totals_batch(trajectories); });
  const double f_par = seconds([&] { fb = feature_totals_batch(trajectories); });
  row("feature_totals_batch", f_ser, f_par, fa == fb);

  SimulationConfig config;
  config.n_sims = 20000;
  config.seed = 11;
  std::vector<int> sa, sb;
  const double s_ser = seconds([&] { sa = reference::simulate_scores(config, b, nullptr); });
  const double s_par = seconds([&] { sb = simulate_scores(config, b, nullptr); });
  row("simulate_scores", s_ser, s_par, sa == sb);

  config.n_sims = 50;
  SimulatorErrorReport ra, rb;
  const double r_ser = seconds([&] { ra = reference::simulator_error_report(corpus, 1, b, nullptr, config); });
  const double r_par = seconds([&] { rb = simulator_error_report(corpus, 1, b, nullptr, config); });
  row("simulator_error_report", r_ser, r_par,
      ra.mean_error_pct == rb.mean_error_pct && ra.std_error_pct == rb.std_error_pct);
  return 0;
}
