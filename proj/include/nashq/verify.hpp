#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nashq/neural.hpp"

namespace nashq::verify {

struct PropertyResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

using HuberFn = std::function<neural::HuberResult(double prediction, double target, double delta)>;

struct VerifyOptions {
  std::uint64_t seed = 0;
  // Loss under test in the critic gradient check; replaceable so a harness
  // can inject a faulty implementation.
  HuberFn huber = neural::huber_loss;
};

/// Runs the matrix-nash, neural and tabular property suites.
std::vector<PropertyResult> run_suites(const VerifyOptions& options);

/// Fixed-width pass/fail table, one row per property.
std::string format_report(const std::vector<PropertyResult>& results);

bool all_pass(const std::vector<PropertyResult>& results);

}  // namespace nashq::verify
