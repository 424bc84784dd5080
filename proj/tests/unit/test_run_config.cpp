#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nashq/run_config.hpp"

using namespace nashq;
using namespace nashq::cli;
namespace fs = std::filesystem;

TEST_CASE("an empty document yields the documented defaults") {
  const auto c = parse_config("{}");
  CHECK(c == RunConfig{});
  CHECK(c.train.discount == 0.99);
  CHECK(c.train.critic_epochs == 6);
  CHECK(c.train.rollout_horizon == 2000);
  CHECK(c.train.batch_size == 64);
  CHECK(c.train.policy_lr == 1e-3);
  CHECK(c.train.critic_lr == 1e-3);
  CHECK(c.train.adam_beta1 == 0.9);
  CHECK(c.train.adam_beta2 == 0.999);
  CHECK(c.train.episodes_per_epoch == 64);
  CHECK(c.env.episode_length == 100);
  CHECK(c.env.cyber.p_exploit == 0.8);
}

TEST_CASE("values are read from every section") {
  const auto c = parse_config(R"(
mode: eval
epochs: 3
train:
  discount: 0.9
  adam_betas: [0.8, 0.99]
  policy_hidden: [16, 8]
env:
  hosts: 4
  episode_length: 20
  weights: {impact: 5.0}
eval:
  episodes: 10
  blue: restore_on_alert
  greedy: true
)");
  CHECK(c.mode == Mode::kEval);
  CHECK(c.epochs == 3);
  CHECK(c.train.discount == 0.9);
  CHECK(c.train.adam_beta1 == 0.8);
  CHECK(c.train.policy_hidden == std::vector<int>{16, 8});
  CHECK(c.env.cyber.num_hosts == 4);
  CHECK(c.env.cyber.weights.impact == 5.0);
  CHECK(c.train.episode_length == 20);
  CHECK(c.eval.blue == EvalBlue::kRestoreOnAlert);
  CHECK(c.eval.greedy);
}

TEST_CASE("out-of-range and unknown keys are rejected with a line number") {
  CHECK_THROWS_WITH_AS(parse_config("train:\n  discount: 1.5\n"), doctest::Contains("line 2"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("train:\n  discount: 0.9\n  bogus: 1\n"),
                       doctest::Contains("bogus"), ConfigError);
  CHECK_THROWS_AS(parse_config("mode: dance\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train: [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("env:\n  p_detect: -0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train:\n  batch_size: 0\n"), ConfigError);
}

TEST_CASE("written configs read back equal") {
  auto c = parse_config("train:\n  seed: 17\n  critic_lr: 0.00031\nenv:\n  p_exploit: 0.3333333333333333\n");
  c.output_dir = "somewhere/else";
  c.eval.trace = true;
  const auto back = parse_config(write_config(c));
  CHECK(back == c);
}

TEST_CASE("tabular fixtures resolve against the config directory") {
  const auto c = load_config(fs::path(NASHQ_SOURCE_DIR) / "configs/swap_game.yaml");
  CHECK(c.env.kind == EnvKind::kTabular);
  CHECK(fs::exists(c.env.game));
  const auto env = make_env_factory(c)();
  CHECK(env->spec().num_blue_actions == 2);
}

TEST_CASE("missing files are reported") {
  CHECK_THROWS_AS(load_config("/nonexistent/run.yaml"), ConfigError);
}
