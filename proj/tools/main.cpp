// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "levelscore/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"levelscore: rating-level visual scoring toolkit"};
  app.require_subcommand(1);

  levelscore::cli::CompileOptions compile_options;
  CLI::App* compile = app.add_subcommand(
      "compile", "Compile MOS-annotated manifests into instruction-response pairs");
  compile->add_option("--manifest", compile_options.manifests, "Manifest file (repeatable)")
      ->required();
  compile->add_flag("--mix", compile_options.mix, "Concatenate the manifests before compiling");
  compile->add_option("--fewshot", compile_options.fewshot,
                      "Keep a uniform seeded fraction (0,1] of the items");
  compile->add_option("--seed", compile_options.seed, "Seed for paraphrase and subsample draws");
  compile->add_option("--out", compile_options.out, "Output JSONL path")->required();
  compile->add_flag("--skip-bad", compile_options.skip_bad,
                    "Skip items with errors instead of failing");
  compile->add_flag("--empirical-range", compile_options.empirical_range,
                    "Partition on observed min/max scores instead of the declared bounds");

  levelscore::cli::DecodeOptions decode_options;
  CLI::App* decode =
      app.add_subcommand("decode", "Fetch per-level logits for items and decode them to scores");
  decode->add_option("--items", decode_options.items, "Manifest of items to score")->required();
  decode->add_option("--provider", decode_options.provider, "Logit source")
      ->check(CLI::IsMember({"replay", "remote", "mock"}))
      ->capture_default_str();
  decode->add_option("--replay", decode_options.replay, "Replay file (replay provider)");
  decode->add_option("--endpoint", decode_options.endpoint,
                     std::string("Service endpoint (remote provider; falls back to $") +
                         levelscore::cli::kEndpointEnvVar + ")");
  decode->add_option("--timeout", decode_options.timeout_ms, "Request timeout in ms")
      ->capture_default_str();
  decode->add_option("--max-inflight", decode_options.max_inflight,
                     "Concurrent in-flight requests")
      ->capture_default_str();
  decode->add_option("--retries", decode_options.retries, "Retries for transport failures")
      ->capture_default_str();
  decode->add_option("--noise", decode_options.noise, "Mock provider noise scale")
      ->capture_default_str();
  decode->add_option("--seed", decode_options.seed, "Mock provider seed");
  decode->add_option("--out", decode_options.out, "Output JSONL path")->required();
  decode->add_flag("--skip-bad", decode_options.skip_bad,
                   "Skip items with errors instead of failing");

  levelscore::cli::EvalOptions eval_options;
  CLI::App* eval = app.add_subcommand("eval", "Correlate predicted scores against labels");
  eval->add_option("--predictions", eval_options.predictions, "Decoded score records")
      ->required();
  eval->add_option("--labels", eval_options.labels, "Manifest carrying the mos labels")
      ->required();
  eval->add_option("--out", eval_options.out, "Also write the machine-readable report here");

  levelscore::cli::SimulateOptions simulate_options;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Simulate rating panels and their MOS aggregation");
  simulate->add_option("--panels", simulate_options.panels, "Number of panels")
      ->capture_default_str();
  simulate->add_option("--raters", simulate_options.raters, "Raters per panel")
      ->capture_default_str();
  simulate->add_option("--mode", simulate_options.mode, "Rating mode")
      ->check(CLI::IsMember({"level", "slider"}))
      ->capture_default_str();
  simulate->add_option("--true-score", simulate_options.true_score,
                       "Latent score in [1,5]; random per panel when omitted");
  simulate->add_option("--noise", simulate_options.noise, "Rater noise scale")
      ->capture_default_str();
  simulate->add_option("--seed", simulate_options.seed, "Master seed");
  simulate->add_option("--out", simulate_options.out, "Output JSONL path (stdout when omitted)");
  simulate->add_flag("--include-ratings", simulate_options.include_ratings,
                     "Emit every rater's initial rating");

  levelscore::cli::BudgetOptions budget_options;
  CLI::App* budget =
      app.add_subcommand("budget", "Check video frame plans against the context budget");
  budget->add_option("--duration", budget_options.duration, "Video duration in seconds");
  budget->add_option("--manifest", budget_options.manifest, "Check every timed item in a manifest");
  budget->add_option("--context-limit", budget_options.context_limit, "Context length in tokens")
      ->capture_default_str();
  budget->add_option("--out", budget_options.out, "Output JSONL path (stdout when omitted)");

  levelscore::cli::EnsembleOptions ensemble_options;
  CLI::App* ensemble =
      app.add_subcommand("ensemble", "Fuse two score files by standardized weighted average");
  ensemble->add_option("--a", ensemble_options.a, "First score file")->required();
  ensemble->add_option("--b", ensemble_options.b, "Second score file")->required();
  ensemble->add_option("--weight", ensemble_options.weight, "Weight of the first file in [0,1]")
      ->capture_default_str();
  ensemble->add_option("--out", ensemble_options.out, "Output JSONL path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  if (compile->parsed()) return levelscore::cli::run_compile(compile_options, std::cout, std::cerr);
  if (decode->parsed()) return levelscore::cli::run_decode(decode_options, std::cout, std::cerr);
  if (eval->parsed()) return levelscore::cli::run_eval(eval_options, std::cout, std::cerr);
  if (simulate->parsed()) {
    return levelscore::cli::run_simulate(simulate_options, std::cout, std::cerr);
  }
  if (budget->parsed()) return levelscore::cli::run_budget(budget_options, std::cout, std::cerr);
  if (ensemble->parsed()) {
    return levelscore::cli::run_ensemble(ensemble_options, std::cout, std::cerr);
  }
  return 1;
}
