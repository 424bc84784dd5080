#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "nashq/game_core.hpp"

namespace nashq {

/// A two-player zero-sum Markov game instance. Each instance is owned by a
/// single thread; instances share nothing.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const MarkovGameSpec& spec() const = 0;

  /// Starts a new episode with its own random stream. The returned outcome
  /// carries the initial observations and masks (reward 0, not done).
  virtual StepOutcome reset(std::uint64_t seed) = 0;

  /// Simultaneous move. Throws ContractViolation for masked actions.
  virtual StepOutcome step(JointAction action) = 0;

  /// Metric category in [0, kNumActionCategories) of an action.
  virtual int blue_category(int action) const = 0;
  virtual int red_category(int action) const = 0;
  /// True if the Red action is an Impact attempt.
  virtual bool is_impact(int red_action) const = 0;

  virtual std::string blue_action_name(int action) const = 0;
  virtual std::string red_action_name(int action) const = 0;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nashq
