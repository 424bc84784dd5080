// Command-line entry point: nashq train|eval|verify <config> [--seed N] [--output-dir DIR]
#include <iostream>

#include <CLI11.hpp>

#include "nashq/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nash Q-Network training, evaluation and verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string output_dir;
  bool greedy = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run config (YAML)")->required();
    sub->add_option("--seed", seed, "override train and eval seeds");
    sub->add_option("--output-dir", output_dir, "override output_dir");
  };
  auto* train = app.add_subcommand("train", "train Blue and Red");
  auto* eval = app.add_subcommand("eval", "evaluate Blue against the scripted attacker");
  auto* verify = app.add_subcommand("verify", "run the oracle property suites");
  add_common(train);
  add_common(eval);
  add_common(verify);
  eval->add_flag("--greedy", greedy, "act greedily instead of sampling");

  CLI11_PARSE(app, argc, argv);

  nashq::cli::RunConfig config;
  try {
    config = nashq::cli::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  for (auto* sub : {train, eval, verify}) {
    if (sub->count("--seed") > 0) {
      config.train.seed = seed;
      config.eval.seed = seed;
    }
    if (sub->count("--output-dir") > 0) config.output_dir = output_dir;
  }
  if (greedy) config.eval.greedy = true;

  if (*train) {
    config.mode = nashq::cli::Mode::kTrain;
    return nashq::cli::run_train(config, std::cout, std::cerr);
  }
  if (*eval) {
    config.mode = nashq::cli::Mode::kEval;
    return nashq::cli::run_eval(config, std::cout, std::cerr);
  }
  config.mode = nashq::cli::Mode::kVerify;
  return nashq::cli::run_verify(config, std::cout, std::cerr);
}
