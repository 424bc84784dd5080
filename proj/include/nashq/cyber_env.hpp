#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nashq/environment.hpp"

namespace nashq::cyber {

enum class RedLevel : std::uint8_t {
  kUnknown = 0,
  kDiscovered = 1,
  kScanned = 2,
  kExploited = 3,
  kPrivileged = 4,
};

struct RewardWeights {
  double exploited = 0.1;
  double privileged = 0.5;
  double impact = 10.0;
  double restore_cost = 0.1;
  double block_cost = 0.05;

  bool operator==(const RewardWeights&) const = default;
};

/// Scenario parameters. Host `num_hosts - 1` is the operational server;
/// hosts form a chain (i adjacent to i + 1).
struct CyberConfig {
  int num_hosts = 5;
  double p_exploit = 0.8;
  double p_detect = 0.7;
  int episode_length = 100;
  RewardWeights weights;

  /// p_exploit = p_detect = 1, so traces are hand-checkable.
  static CyberConfig deterministic();

  int server() const { return num_hosts - 1; }
  int num_actions() const { return 1 + 4 * num_hosts; }
  int blue_obs_dim() const { return 4 * num_hosts; }
  int red_obs_dim() const { return 6 * num_hosts; }

  void validate() const;
  bool operator==(const CyberConfig&) const = default;
};

enum class BlueKind : std::uint8_t { kSleep, kAnalyse, kRestore, kDecoy, kBlock };
enum class RedKind : std::uint8_t { kDiscover, kScan, kExploit, kEscalate, kImpact };

struct BlueAction {
  BlueKind kind = BlueKind::kSleep;
  int host = -1;
};
struct RedAction {
  RedKind kind = RedKind::kDiscover;
  int host = -1;
};

// Index layout: the unconditional action first, then one block of
// num_hosts entries per action type, ordered by host.
int blue_index(const CyberConfig& config, BlueAction action);
int red_index(const CyberConfig& config, RedAction action);
BlueAction decode_blue(const CyberConfig& config, int index);
RedAction decode_red(const CyberConfig& config, int index);
std::string blue_name(const CyberConfig& config, int index);
std::string red_name(const CyberConfig& config, int index);

struct CyberState {
  std::vector<RedLevel> red_level;
  std::vector<std::uint8_t> decoy;
  std::vector<std::uint8_t> blocked;
  std::vector<std::uint8_t> alert;     // detection during the last step
  std::vector<std::uint8_t> analysed;  // Blue's last-known compromise view
  // Red learned of the block by failing an exploit against it.
  std::vector<std::uint8_t> block_observed;
  int t = 0;

  int num_hosts() const { return static_cast<int>(red_level.size()); }
  bool operator==(const CyberState&) const = default;
};

struct Observations {
  std::vector<double> blue;
  std::vector<double> red;
};

struct Masks {
  ActionMask blue;
  ActionMask red;
};

struct StepEvents {
  double blue_reward = 0.0;
  bool impact_attempted = false;
  bool impact_succeeded = false;
  bool done = false;
};

/// Host 0 Discovered, everything else Unknown and clear, t = 0.
CyberState initial_state(const CyberConfig& config);

/// Blue effects, then Red effects, then reward, then t + 1. Throws
/// ContractViolation if either action is masked in `state`.
StepEvents apply_step(const CyberConfig& config, CyberState& state, int blue_action,
                      int red_action, std::mt19937_64& rng);

Observations encode_obs(const CyberState& state);
Masks legal_mask(const CyberConfig& config, const CyberState& state);

/// Scripted aggressive attacker: Impact(server) > Escalate > Exploit > Scan >
/// Discover, host ties broken toward the highest index.
int bline_policy(const CyberConfig& config, const CyberState& state);

/// "t blue red r_B l0,l1,...": one line per step of the trace dump.
std::string trace_line(const CyberConfig& config, int t, int blue_action, int red_action,
                       double blue_reward, const CyberState& after);

/// Environment wrapper owning a state and its random stream.
class CyberEnv final : public Environment {
 public:
  explicit CyberEnv(CyberConfig config, double discount = 0.99);

  const MarkovGameSpec& spec() const override { return spec_; }
  StepOutcome reset(std::uint64_t seed) override;
  StepOutcome step(JointAction action) override;

  int blue_category(int action) const override;
  int red_category(int action) const override;
  bool is_impact(int red_action) const override;
  std::string blue_action_name(int action) const override;
  std::string red_action_name(int action) const override;

  const CyberConfig& config() const { return config_; }
  const CyberState& state() const { return state_; }

 private:
  StepOutcome outcome(const StepEvents& events) const;

  CyberConfig config_;
  MarkovGameSpec spec_;
  CyberState state_;
  std::mt19937_64 rng_;
};

}  // namespace nashq::cyber
