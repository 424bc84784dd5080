#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nashq/evaluate.hpp"
#include "nashq/run_config.hpp"
#include "nashq/train.hpp"
#include "nashq/verify.hpp"

namespace nashq::cli {

/// train_metrics.csv: epoch, mean_reward, std_reward, critic_loss,
/// blue_policy_loss, red_policy_loss, mean_attack_attempts, mean_impacts,
/// blue_freq_{sleep,analyse,restore,decoy,block},
/// red_freq_{discover,scan,exploit,escalate,impact}.
std::string metrics_header();
std::string metrics_row(const train::EpochStats& row);

/// eval_timeseries.csv: t, mean_cumulative_reward, std_cumulative_reward,
/// mean_attempts, mean_impacts, then the ten per-category frequencies at t.
std::string eval_timeseries_csv(const eval::EvalResult& result);
/// eval_summary.csv: one row of end-of-episode aggregates.
std::string eval_summary_csv(const eval::EvalResult& result);

// Each returns a process exit status and reports problems on `err`.
int run_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_eval(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err,
               const verify::VerifyOptions* override_options = nullptr);

}  // namespace nashq::cli
