// Command-line front end: ingest, train, evaluate, predict, irl, policy, simulate.

#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cricket/artifacts.hpp"
#include "cricket/dls.hpp"
#include "cricket/errors.hpp"
#include "cricket/evaluation.hpp"
#include "cricket/io.hpp"
#include "cricket/irl.hpp"
#include "cricket/match_data.hpp"
#include "cricket/policy.hpp"
#include "cricket/simulator.hpp"
#include "cricket/value_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cricket;

namespace {

struct NetworkFlags {
  std::vector<int> hidden{32, 16};
  int epochs = 30;
  double learning_rate = 0.05;
  int batch_size = 32;

  void add(CLI::App* cmd) {
    cmd->add_option("--hidden", hidden, "Hidden layer widths")->delimiter(',');
    cmd->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
    cmd->add_option("--learning-rate", learning_rate)->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", batch_size)->check(CLI::PositiveNumber);
  }

  NetworkConfig config(int innings, std::uint64_t seed) const {
    NetworkConfig c;
    c.input_width = innings == 1 ? 5 : 6;
    c.hidden_widths = hidden;
    c.epochs = epochs;
    c.learning_rate = learning_rate;
    c.batch_size = batch_size;
    c.seed = seed;
    return c;
  }
};

// Every option of a subcommand that was given or has a default, for provenance.
// Output destinations are left out so a report does not depend on where it is written.
json echo_config(const CLI::App* cmd) {
  static const std::set<std::string> destinations{"help", "out", "csv", "report", "transitions-out",
                                                  "second-innings-out"};
  json out = json::object();
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_lnames().empty() || destinations.count(opt->get_lnames().front())) continue;
    const auto& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto results = opt->reduced_results();
      out[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (!opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

Provenance provenance(const CLI::App* cmd, std::uint64_t seed, const Corpus* corpus) {
  Provenance p;
  p.seed = seed;
  p.config = echo_config(cmd);
  if (corpus != nullptr) p.corpus_manifest_hash = std::to_string(manifest_hash(*corpus));
  return p;
}

void save(const fs::path& path, ArtifactKind kind, json payload, Provenance prov) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_artifact(path, Artifact{kind, kSchemaVersion, std::move(prov), std::move(payload)});
}

// Splices `--config file.json` into argv after the subcommand so command-line flags,
// which come later, win under the take-last policy.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (!config_path) return args;
  json doc;
  try {
    doc = json::parse(read_file(*config_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(*config_path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(*config_path + ": config must be a JSON object");
  std::vector<std::string> injected;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      injected.push_back(flag);
      injected.push_back(joined);
    } else {
      injected.push_back(flag);
      injected.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  // Insert after the first positional token (the subcommand).
  auto pos = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
  if (pos != args.end()) ++pos;
  args.insert(pos, injected.begin(), injected.end());
  return args;
}

std::vector<fs::path> json_files(const fs::path& input) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    for (const auto& e : fs::directory_iterator(input))
      if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "manifest.json")
        files.push_back(e.path());
  } else if (fs::is_regular_file(input)) {
    files.push_back(input);
  } else {
    throw ConfigError("input '" + input.string() + "' does not exist");
  }
  std::sort(files.begin(), files.end());
  return files;
}

DlsTable load_dls(const fs::path& path) {
  auto loaded = load_dls_table(read_file(path));
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  return loaded.table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-model cricket analytics: resource estimation, reward learning, simulation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string config_unused;
  app.add_option("--threads", threads, "Cap on worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", config_unused, "JSON file whose keys mirror the flags");

  std::uint64_t seed = 0;
  int innings = 1;
  std::string corpus_dir, out, model_path, dls_path, coeff_path, transitions_path, policy_path;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Raw match files -> canonical corpus");
  std::string ingest_input, ingest_format = "canonical", ingested_at = "unspecified";
  bool exclude_dls = false;
  ingest->add_option("--input", ingest_input, "File or directory of JSON documents")->required();
  ingest->add_option("--format", ingest_format)->check(CLI::IsMember({"canonical", "cricsheet"}));
  ingest->add_option("--out", out, "Corpus directory")->required();
  ingest->add_option("--ingested-at", ingested_at, "Timestamp recorded in the manifest");
  ingest->add_flag("--exclude-dls-decided", exclude_dls, "Drop matches decided by a DLS revision");

  // synthesize (demo corpora)
  auto* synth = app.add_subcommand("synthesize", "Sample a corpus from a constant per-ball model");
  int synth_matches = 100;
  double synth_wicket = 0.03, synth_extra = 0.0;
  std::vector<double> synth_dist{0.4, 0.35, 0.1, 0.02, 0.1, 0.03};
  synth->add_option("--matches", synth_matches)->check(CLI::PositiveNumber);
  synth->add_option("--wicket-prob", synth_wicket)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--extra-prob", synth_extra)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--run-dist", synth_dist, "Probabilities of 0,1,2,3,4,6 runs")->delimiter(',');
  synth->add_option("--seed", seed)->required();
  synth->add_option("--out", out, "Corpus directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit the resources-left network");
  NetworkFlags train_net;
  std::string report_out;
  train_cmd->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--innings", innings)->check(CLI::Range(1, 2));
  train_cmd->add_option("--seed", seed)->required();
  train_cmd->add_option("--out", out, "Model file")->required();
  train_cmd->add_option("--report", report_out, "Training report file");
  train_net.add(train_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Ten-fold interruption test, network vs table");
  NetworkFlags eval_net;
  std::string csv_out;
  eval_cmd->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--innings", innings)->check(CLI::Range(1, 2));
  eval_cmd->add_option("--dls", dls_path, "Resource table CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--seed", seed)->required();
  eval_cmd->add_option("--out", out, "Report file")->required();
  eval_cmd->add_option("--csv", csv_out, "Per-fold CSV export");
  eval_net.add(eval_cmd);

  // predict
  auto* predict = app.add_subcommand("predict", "Resources left and projected final score");
  int p_over = 0, p_ball = 0, p_wickets = 0, p_score = 0, p_extra = 0, p_target = -1;
  predict->add_option("--innings", innings)->check(CLI::Range(1, 2));
  predict->add_option("--over", p_over)->required()->check(CLI::Range(0, 49));
  predict->add_option("--ball", p_ball)->check(CLI::Range(0, 5));
  predict->add_option("--wickets", p_wickets)->required()->check(CLI::Range(0, 9));
  predict->add_option("--score", p_score)->required()->check(CLI::NonNegativeNumber);
  predict->add_option("--extra", p_extra)->check(CLI::Range(0, 1));
  predict->add_option("--target", p_target, "First-innings score (second innings)");
  predict->add_option("--model", model_path)->required()->check(CLI::ExistingFile);

  // irl
  auto* irl_cmd = app.add_subcommand("irl", "Learn reward coefficients from winners and losers");
  irl_cmd->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
  irl_cmd->add_option("--seed", seed)->required();
  irl_cmd->add_option("--out", out, "Coefficients file")->required();

  // policy
  auto* policy_cmd = app.add_subcommand("policy", "Transition counts, Q values and the optimal policy");
  std::string transitions2_out;
  policy_cmd->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
  policy_cmd->add_option("--coefficients", coeff_path)->required()->check(CLI::ExistingFile);
  policy_cmd->add_option("--seed", seed)->required();
  policy_cmd->add_option("--transitions-out", transitions_path, "First-innings transitions")->required();
  policy_cmd->add_option("--second-innings-out", transitions2_out, "Second-innings transitions");
  policy_cmd->add_option("--out", out, "Policy file")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Posterior final-score distribution by simulation");
  std::string mode_text = "behavioral", transitions2_path, sim_corpus;
  int n_sims = 100, s_over = 0, s_ball = 0, s_wickets = 0, s_score = 0, s_target = -1, matches = 0;
  bool dump_trajectories = false;
  sim_cmd->add_option("--transitions", transitions_path, "Transitions of the simulated innings")
      ->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--second-innings", transitions2_path, "Second-innings transitions (matches)")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--policy", policy_path)->check(CLI::ExistingFile);
  sim_cmd->add_option("--mode", mode_text)->check(CLI::IsMember({"behavioral", "optimal"}));
  sim_cmd->add_option("--n-sims", n_sims)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed)->required();
  sim_cmd->add_option("--over", s_over)->check(CLI::Range(0, 50));
  sim_cmd->add_option("--ball", s_ball)->check(CLI::Range(0, 5));
  sim_cmd->add_option("--wickets", s_wickets)->check(CLI::Range(0, 10));
  sim_cmd->add_option("--score", s_score)->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--target", s_target, "Score to beat (second-innings start)");
  sim_cmd->add_option("--corpus", sim_corpus, "Also write an error report over this corpus")
      ->check(CLI::ExistingDirectory);
  sim_cmd->add_option("--matches", matches, "Also simulate this many full matches");
  sim_cmd->add_flag("--trajectories", dump_trajectories, "Dump simulated trajectories as JSON lines");
  sim_cmd->add_option("--out", out, "Output directory")->required();

  try {
    const auto args = expand_config(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*ingest) {
      Corpus corpus;
      corpus.source = ingest_input;
      corpus.ingested_at = ingested_at;
      AdaptOptions opts;
      opts.exclude_dls_decided = exclude_dls;
      std::size_t rejected = 0;
      for (const auto& file : json_files(ingest_input)) {
        const auto text = read_file(file);
        try {
          if (ingest_format == "canonical") {
            corpus.matches.push_back(parse_match(text));
          } else {
            corpus.matches.push_back(
                adapt_cricsheet(json::parse(text), file.stem().string(), opts));
          }
        } catch (const Error& e) {
          ++rejected;
          std::cerr << "skip " << file.string() << ": " << e.what() << '\n';
        } catch (const json::exception& e) {
          ++rejected;
          std::cerr << "skip " << file.string() << ": " << e.what() << '\n';
        }
      }
      for (const auto& v : validate_corpus(corpus))
        std::cerr << "invalid " << v.match_id << ": " << v.invariant << '\n';
      write_corpus(corpus, out);
      std::cout << "ingested " << corpus.matches.size() << " matches, rejected " << rejected << '\n';
    } else if (*synth) {
      if (synth_dist.size() != 6) throw ConfigError("--run-dist needs six probabilities");
      std::array<double, 6> dist{};
      std::copy(synth_dist.begin(), synth_dist.end(), dist.begin());
      const auto m1 = TransitionModel::constant(1, synth_wicket, dist, synth_extra);
      const auto m2 = TransitionModel::constant(2, synth_wicket, dist, synth_extra);
      Corpus corpus;
      corpus.source = "synthetic";
      corpus.ingested_at = "unspecified";
      for (int i = 0; i < synth_matches; ++i)
        corpus.matches.push_back(synthesize_match(m1, m2, seed, static_cast<std::uint64_t>(i), synth_extra > 0));
      write_corpus(corpus, out);
      std::cout << "wrote " << corpus.matches.size() << " matches to " << out << '\n';
    } else if (*train_cmd) {
      const auto corpus = read_corpus(corpus_dir);
      std::vector<McSample> samples;
      for (const auto& m : corpus.matches) {
        if (!eligible_innings(m, innings)) continue;
        auto s = mc_targets(build_trajectory(m, innings), m.score(innings));
        samples.insert(samples.end(), s.begin(), s.end());
      }
      if (samples.empty()) throw ConfigError("corpus has no eligible innings to train on");
      const auto config = train_net.config(innings, seed);
      auto [net, report] = train(config, samples);
      const auto prov = provenance(train_cmd, seed, &corpus);
      save(out, ArtifactKind::Model, to_json(net), prov);
      if (report_out.empty()) report_out = out + ".report.json";
      save(report_out, ArtifactKind::Report, to_json(report), prov);
      std::cout << "trained on " << samples.size() << " samples, final mse " << report.final_mse << '\n';
    } else if (*eval_cmd) {
      const auto corpus = read_corpus(corpus_dir);
      const auto table = load_dls(dls_path);
      const auto report = cross_validate(corpus, eval_net.config(innings, seed), table, innings, seed);
      save(out, ArtifactKind::Report, to_json(report), provenance(eval_cmd, seed, &corpus));
      if (!csv_out.empty()) write_file_atomic(csv_out, fold_csv(report));
      std::cout << "model mean error " << report.model.mean << "% (std " << report.model.std
                << "), table mean error " << report.dls.mean << "% (std " << report.dls.std << ")\n";
    } else if (*predict) {
      const auto net = network_from_json(load_artifact(model_path, ArtifactKind::Model).payload);
      InningsState s{p_over, p_wickets, score_band(p_score), p_ball, p_extra, std::nullopt};
      if (innings == 2) {
        if (p_target < 0) throw ConfigError("second-innings prediction needs --target");
        s.target_band = score_band(p_target);
      }
      if (net.input_width() != (innings == 1 ? 5 : 6))
        throw ConfigError("model input width does not match innings " + std::to_string(innings));
      const double r = net.predict(s);
      std::cout << "resources_left " << r << '\n'
                << "projected_final_score " << predicted_final_score(p_score, r) << '\n';
    } else if (*irl_cmd) {
      const auto corpus = read_corpus(corpus_dir);
      const auto parts = partition_expert(corpus);
      const auto result = run_irl(parts.expert, parts.nonexpert);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      auto payload = to_json(result);
      payload["excluded_matches"] = parts.excluded;
      save(out, ArtifactKind::Coefficients, payload, provenance(irl_cmd, seed, &corpus));
      std::cout << "objective " << result.objective << " after " << result.log.size() << " conditions\n";
    } else if (*policy_cmd) {
      const auto corpus = read_corpus(corpus_dir);
      const auto coeffs =
          coefficients_from_json(load_artifact(coeff_path, ArtifactKind::Coefficients).payload);
      auto model = estimate_transitions(corpus, 1);
      const auto q = compute_q(coeffs, model);
      const auto policy = optimal_policy(q);
      model.set_choices(nonoptimal_rate(corpus, policy));
      const auto prov = provenance(policy_cmd, seed, &corpus);
      save(transitions_path, ArtifactKind::Transitions, to_json(model), prov);
      if (!transitions2_out.empty())
        save(transitions2_out, ArtifactKind::Transitions, to_json(estimate_transitions(corpus, 2)), prov);
      std::vector<std::uint32_t> visited;
      for (const auto& [idx, c] : model.deliveries().exact) visited.push_back(idx);
      std::sort(visited.begin(), visited.end());
      save(out, ArtifactKind::Policy, to_json(policy, &q, visited), prov);
      std::cout << "policy over " << policy.action.size() << " states, " << visited.size()
                << " visited\n";
    } else if (*sim_cmd) {
      const auto model =
          transition_model_from_json(load_artifact(transitions_path, ArtifactKind::Transitions).payload);
      std::optional<PolicyTable> policy;
      if (!policy_path.empty())
        policy = policy_from_json(load_artifact(policy_path, ArtifactKind::Policy).payload);
      SimulationConfig config;
      config.n_sims = n_sims;
      config.seed = seed;
      config.mode = sim_mode_from_string(mode_text);
      config.start = {s_over, s_ball, s_wickets, s_score, 0,
                      s_target >= 0 ? std::optional<int>(s_target) : std::nullopt};
      const PolicyTable* acting = policy ? &*policy : nullptr;
      if (config.mode == SimMode::Optimal && !acting)
        throw ConfigError("optimal mode requires --policy");
      if (config.start.innings() != model.innings())
        throw ConfigError("--target must be given exactly for second-innings transitions");
      const fs::path dir(out);
      const auto prov = provenance(sim_cmd, seed, nullptr);
      const auto scores = simulate_scores(config, model, acting);
      const auto dist = distribution_from_scores(scores);
      fs::create_directories(dir);
      write_file_atomic(dir / "distribution.csv", distribution_csv(dist));
      save(dir / "distribution.json", ArtifactKind::Distribution, to_json(dist, config.mode), prov);
      if (dump_trajectories) {
        std::string lines;
        const PolicyTable* p = config.mode == SimMode::Optimal ? acting : nullptr;
        for (int i = 0; i < n_sims; ++i) {
          auto rng = make_rng(seed, "sim", static_cast<std::uint64_t>(i));
          const auto sim = simulate_innings(model, p, config.start, rng, true);
          json header = {{"sim", i}, {"final_score", sim.final_score}};
          lines += header.dump() + "\n" + trajectory_jsonl(sim.trajectory);
        }
        write_file_atomic(dir / "trajectories.jsonl", lines);
      }
      std::cout << "mean " << dist.mean << " std " << dist.std << " over " << dist.n << " simulations\n";
      if (!sim_corpus.empty()) {
        const auto corpus = read_corpus(sim_corpus);
        const auto report = simulator_error_report(corpus, model.innings(), model, acting, config);
        save(dir / "error_report.json", ArtifactKind::Report, to_json(report),
             provenance(sim_cmd, seed, &corpus));
        std::cout << "error report: mean " << report.mean_error_pct << "% std " << report.std_error_pct
                  << "% over " << report.matches.size() << " matches\n";
      }
      if (matches > 0) {
        if (transitions2_path.empty()) throw ConfigError("--matches needs --second-innings");
        if (model.innings() != 1) throw ConfigError("--matches needs first-innings --transitions");
        const auto model2 = transition_model_from_json(
            load_artifact(transitions2_path, ArtifactKind::Transitions).payload);
        std::vector<MatchOutcome> outcomes(static_cast<std::size_t>(matches));
        const PolicyTable* p = config.mode == SimMode::Optimal ? acting : nullptr;
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < matches; ++i)
          outcomes[static_cast<std::size_t>(i)] =
              simulate_match(model, model2, p, seed, static_cast<std::uint64_t>(i));
        std::size_t wins = 0, ties = 0;
        for (const auto& o : outcomes) {
          wins += o.winner == 1;
          ties += o.winner == 0;
        }
        const double decided = static_cast<double>(matches) - static_cast<double>(ties);
        json payload = {{"matches", matches},
                        {"team_1_wins", wins},
                        {"ties", ties},
                        {"team_1_win_fraction", decided > 0 ? wins / decided : 0.0},
                        {"mode_flag", to_string(config.mode)}};
        save(dir / "matches.json", ArtifactKind::Report, payload, prov);
        std::cout << "team 1 won " << wins << " of " << matches << " (" << ties << " ties)\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
