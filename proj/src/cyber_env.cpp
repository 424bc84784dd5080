#include "nashq/cyber_env.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "nashq/io_util.hpp"

namespace nashq::cyber {
namespace {

bool at_least(RedLevel level, RedLevel floor) {
  return static_cast<int>(level) >= static_cast<int>(floor);
}

void raise_to(RedLevel& level, RedLevel floor) {
  if (!at_least(level, floor)) level = floor;
}

bool draw(std::mt19937_64& rng, double p) { return unit_draw(rng) < p; }

constexpr const char* kBlueNames[] = {"Sleep", "Analyse", "Restore", "Decoy", "Block"};
constexpr const char* kRedNames[] = {"Discover", "Scan", "Exploit", "Escalate", "Impact"};

}  // namespace

CyberConfig CyberConfig::deterministic() {
  CyberConfig c;
  c.p_exploit = 1.0;
  c.p_detect = 1.0;
  return c;
}

void CyberConfig::validate() const {
  if (num_hosts < 2) {
    throw std::invalid_argument("CyberConfig: hosts must be >= 2, got " +
                                std::to_string(num_hosts));
  }
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(std::string("CyberConfig: ") + name + " must lie in [0, 1]");
    }
  };
  prob(p_exploit, "p_exploit");
  prob(p_detect, "p_detect");
  if (episode_length < 1) {
    throw std::invalid_argument("CyberConfig: episode_length must be >= 1");
  }
  for (double w : {weights.exploited, weights.privileged, weights.impact,
                   weights.restore_cost, weights.block_cost}) {
    if (!(w >= 0.0)) throw std::invalid_argument("CyberConfig: reward weights must be >= 0");
  }
}

int blue_index(const CyberConfig& config, BlueAction action) {
  if (action.kind == BlueKind::kSleep) return 0;
  return 1 + (static_cast<int>(action.kind) - 1) * config.num_hosts + action.host;
}

int red_index(const CyberConfig& config, RedAction action) {
  if (action.kind == RedKind::kDiscover) return 0;
  return 1 + (static_cast<int>(action.kind) - 1) * config.num_hosts + action.host;
}

BlueAction decode_blue(const CyberConfig& config, int index) {
  if (index < 0 || index >= config.num_actions()) {
    throw std::out_of_range("blue action index " + std::to_string(index) + " out of range");
  }
  if (index == 0) return {};
  const int h = config.num_hosts;
  return {static_cast<BlueKind>(1 + (index - 1) / h), (index - 1) % h};
}

RedAction decode_red(const CyberConfig& config, int index) {
  if (index < 0 || index >= config.num_actions()) {
    throw std::out_of_range("red action index " + std::to_string(index) + " out of range");
  }
  if (index == 0) return {};
  const int h = config.num_hosts;
  return {static_cast<RedKind>(1 + (index - 1) / h), (index - 1) % h};
}

std::string blue_name(const CyberConfig& config, int index) {
  const BlueAction a = decode_blue(config, index);
  std::string name = kBlueNames[static_cast<int>(a.kind)];
  if (a.kind != BlueKind::kSleep) name += "(" + std::to_string(a.host) + ")";
  return name;
}

std::string red_name(const CyberConfig& config, int index) {
  const RedAction a = decode_red(config, index);
  std::string name = kRedNames[static_cast<int>(a.kind)];
  if (a.kind != RedKind::kDiscover) name += "(" + std::to_string(a.host) + ")";
  return name;
}

CyberState initial_state(const CyberConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.num_hosts);
  CyberState s;
  s.red_level.assign(n, RedLevel::kUnknown);
  s.red_level[0] = RedLevel::kDiscovered;
  s.decoy.assign(n, 0);
  s.blocked.assign(n, 0);
  s.alert.assign(n, 0);
  s.analysed.assign(n, 0);
  s.block_observed.assign(n, 0);
  s.t = 0;
  return s;
}

Masks legal_mask(const CyberConfig& config, const CyberState& state) {
  const int h = config.num_hosts;
  Masks m;
  m.blue.assign(config.num_actions(), 0);
  m.red.assign(config.num_actions(), 0);

  m.blue[0] = 1;
  for (int i = 0; i < h; ++i) {
    m.blue[blue_index(config, {BlueKind::kAnalyse, i})] = 1;
    m.blue[blue_index(config, {BlueKind::kRestore, i})] = 1;
    m.blue[blue_index(config, {BlueKind::kDecoy, i})] = state.decoy[i] == 0;
    m.blue[blue_index(config, {BlueKind::kBlock, i})] = state.blocked[i] == 0;
  }

  m.red[0] = 1;
  for (int i = 0; i < h; ++i) {
    const RedLevel level = state.red_level[i];
    m.red[red_index(config, {RedKind::kScan, i})] = level == RedLevel::kDiscovered;
    m.red[red_index(config, {RedKind::kExploit, i})] = level == RedLevel::kScanned;
    m.red[red_index(config, {RedKind::kEscalate, i})] = level == RedLevel::kExploited;
    m.red[red_index(config, {RedKind::kImpact, i})] =
        i == config.server() && level == RedLevel::kPrivileged;
  }
  return m;
}

StepEvents apply_step(const CyberConfig& config, CyberState& state, int blue_action,
                      int red_action, std::mt19937_64& rng) {
  const Masks masks = legal_mask(config, state);
  if (blue_action < 0 || blue_action >= config.num_actions() || masks.blue[blue_action] == 0) {
    throw ContractViolation("step: Blue action " + std::to_string(blue_action) +
                            " is masked at t=" + std::to_string(state.t));
  }
  if (red_action < 0 || red_action >= config.num_actions() || masks.red[red_action] == 0) {
    throw ContractViolation("step: Red action " + std::to_string(red_action) +
                            " is masked at t=" + std::to_string(state.t));
  }
  std::fill(state.alert.begin(), state.alert.end(), 0);

  // Blue resolves first.
  const BlueAction blue = decode_blue(config, blue_action);
  switch (blue.kind) {
    case BlueKind::kSleep:
      break;
    case BlueKind::kAnalyse:
      state.analysed[blue.host] = at_least(state.red_level[blue.host], RedLevel::kExploited);
      break;
    case BlueKind::kRestore:
      state.red_level[blue.host] = std::min(state.red_level[blue.host], RedLevel::kDiscovered);
      state.analysed[blue.host] = 0;
      break;
    case BlueKind::kDecoy:
      state.decoy[blue.host] = 1;
      break;
    case BlueKind::kBlock:
      state.blocked[blue.host] = 1;
      break;
  }

  StepEvents events;
  const RedAction red = decode_red(config, red_action);
  const int h = red.host;
  switch (red.kind) {
    case RedKind::kDiscover: {
      std::vector<std::uint8_t> reach(state.red_level.size(), 0);
      reach[0] = 1;
      for (int i = 0; i < state.num_hosts(); ++i) {
        if (!at_least(state.red_level[i], RedLevel::kExploited)) continue;
        if (i > 0) reach[i - 1] = 1;
        if (i + 1 < state.num_hosts()) reach[i + 1] = 1;
      }
      for (std::size_t i = 0; i < reach.size(); ++i) {
        if (reach[i] != 0) raise_to(state.red_level[i], RedLevel::kDiscovered);
      }
      break;
    }
    case RedKind::kScan:
      if (state.red_level[h] == RedLevel::kDiscovered) state.red_level[h] = RedLevel::kScanned;
      break;
    case RedKind::kExploit:
      if (state.red_level[h] != RedLevel::kScanned) break;  // restored this step
      if (state.blocked[h] != 0) {
        state.block_observed[h] = 1;
        if (draw(rng, config.p_detect)) state.alert[h] = 1;
      } else if (state.decoy[h] != 0) {
        state.decoy[h] = 0;
        state.alert[h] = 1;
      } else if (draw(rng, config.p_exploit)) {
        state.red_level[h] = RedLevel::kExploited;
        if (draw(rng, config.p_detect)) state.alert[h] = 1;
      }
      break;
    case RedKind::kEscalate:
      if (state.red_level[h] == RedLevel::kExploited) state.red_level[h] = RedLevel::kPrivileged;
      break;
    case RedKind::kImpact:
      events.impact_attempted = true;
      events.impact_succeeded =
          h == config.server() && state.red_level[h] == RedLevel::kPrivileged;
      break;
  }

  int n_exploited = 0;
  int n_privileged = 0;
  int n_blocks = 0;
  for (int i = 0; i < state.num_hosts(); ++i) {
    n_exploited += state.red_level[i] == RedLevel::kExploited;
    n_privileged += state.red_level[i] == RedLevel::kPrivileged;
    n_blocks += state.blocked[i] != 0;
  }
  const auto& w = config.weights;
  events.blue_reward = 0.0 - (w.exploited * n_exploited + w.privileged * n_privileged) -
                       w.impact * (events.impact_succeeded ? 1.0 : 0.0) -
                       w.restore_cost * (blue.kind == BlueKind::kRestore ? 1.0 : 0.0) -
                       w.block_cost * n_blocks;

  ++state.t;
  events.done = state.t >= config.episode_length;
  return events;
}

Observations encode_obs(const CyberState& state) {
  const int h = state.num_hosts();
  Observations obs;
  obs.blue.assign(4 * h, 0.0);
  obs.red.assign(6 * h, 0.0);
  for (int i = 0; i < h; ++i) {
    obs.blue[4 * i + 0] = state.alert[i];
    obs.blue[4 * i + 1] = state.analysed[i];
    obs.blue[4 * i + 2] = state.decoy[i];
    obs.blue[4 * i + 3] = state.blocked[i];
    obs.red[5 * i + static_cast<int>(state.red_level[i])] = 1.0;
    obs.red[5 * h + i] = state.block_observed[i];
  }
  return obs;
}

int bline_policy(const CyberConfig& config, const CyberState& state) {
  const Masks masks = legal_mask(config, state);
  for (RedKind kind : {RedKind::kImpact, RedKind::kEscalate, RedKind::kExploit, RedKind::kScan}) {
    for (int host = config.num_hosts - 1; host >= 0; --host) {
      const int idx = red_index(config, {kind, host});
      if (masks.red[idx] != 0) return idx;
    }
  }
  return red_index(config, {RedKind::kDiscover, -1});
}

std::string trace_line(const CyberConfig& config, int t, int blue_action, int red_action,
                       double blue_reward, const CyberState& after) {
  std::string line = std::to_string(t) + " " + blue_name(config, blue_action) + " " +
                     red_name(config, red_action) + " " + format_real(blue_reward) + " ";
  for (int i = 0; i < after.num_hosts(); ++i) {
    if (i > 0) line += ",";
    line += std::to_string(static_cast<int>(after.red_level[i]));
  }
  return line;
}

CyberEnv::CyberEnv(CyberConfig config, double discount) : config_(std::move(config)) {
  config_.validate();
  spec_.num_blue_actions = config_.num_actions();
  spec_.num_red_actions = config_.num_actions();
  spec_.blue_obs_dim = config_.blue_obs_dim();
  spec_.red_obs_dim = config_.red_obs_dim();
  spec_.discount = discount;
  spec_.validate();
  state_ = initial_state(config_);
}

StepOutcome CyberEnv::outcome(const StepEvents& events) const {
  Observations obs = encode_obs(state_);
  Masks masks = legal_mask(config_, state_);
  StepOutcome out;
  out.blue_obs = std::move(obs.blue);
  out.red_obs = std::move(obs.red);
  out.blue_mask = std::move(masks.blue);
  out.red_mask = std::move(masks.red);
  out.blue_reward = events.blue_reward;
  out.done = events.done;
  out.truncated = events.done;  // the horizon is the only way an episode ends
  out.impact_attempted = events.impact_attempted;
  out.impact_succeeded = events.impact_succeeded;
  return out;
}

StepOutcome CyberEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = initial_state(config_);
  return outcome(StepEvents{});
}

StepOutcome CyberEnv::step(JointAction action) {
  if (state_.t >= config_.episode_length) {
    throw ContractViolation("step: episode already finished; call reset");
  }
  const StepEvents events = apply_step(config_, state_, action.blue, action.red, rng_);
  return outcome(events);
}

int CyberEnv::blue_category(int action) const {
  return static_cast<int>(decode_blue(config_, action).kind);
}

int CyberEnv::red_category(int action) const {
  return static_cast<int>(decode_red(config_, action).kind);
}

bool CyberEnv::is_impact(int red_action) const {
  return decode_red(config_, red_action).kind == RedKind::kImpact;
}

std::string CyberEnv::blue_action_name(int action) const { return blue_name(config_, action); }
std::string CyberEnv::red_action_name(int action) const { return red_name(config_, action); }

}  // namespace nashq::cyber
