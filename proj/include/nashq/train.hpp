#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nashq/checkpoint.hpp"
#include "nashq/environment.hpp"
#include "nashq/matrix_nash.hpp"
#include "nashq/neural.hpp"

namespace nashq::train {

/// Training hyperparameters.
struct TrainConfig {
  double discount = 0.99;
  int critic_epochs = 6;        // K
  int rollout_horizon = 2000;   // T, per-worker buffer capacity
  int batch_size = 64;          // B
  double policy_lr = 1e-3;
  double critic_lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double huber_delta = 1.0;
  int num_workers = 4;
  int episodes_per_epoch = 64;
  int episode_length = 100;
  std::uint64_t seed = 0;
  std::vector<int> policy_hidden{64, 64};
  std::vector<int> critic_hidden{128, 128};
  // Horizon cutoffs bootstrap (truncation); set false to treat them as terminal.
  bool bootstrap_on_truncation = true;
  // Freeze TD targets for all K critic passes instead of refreshing per pass.
  bool frozen_targets = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Seed of worker `i`: seed * 1'000'003 + i.
  std::uint64_t worker_seed(int worker) const;
  bool operator==(const TrainConfig&) const = default;
};

/// One joint transition as stored in the rollout buffer. The behaviour
/// policies carry the masks that were in force when acting.
struct RolloutRecord {
  std::vector<double> blue_obs;
  std::vector<double> red_obs;
  int blue_action = 0;
  int red_action = 0;
  MixedStrategy blue_policy;
  MixedStrategy red_policy;
  double blue_reward = 0.0;
  std::vector<double> next_blue_obs;
  std::vector<double> next_red_obs;
  ActionMask next_blue_mask;
  ActionMask next_red_mask;
  bool done = false;
  bool truncated = false;

  const ActionMask& blue_mask() const { return blue_policy.mask; }
  const ActionMask& red_mask() const { return red_policy.mask; }
  bool operator==(const RolloutRecord& o) const;
};

class RolloutBuffer {
 public:
  explicit RolloutBuffer(std::size_t capacity) : capacity_(capacity) {}

  /// Throws std::length_error when full.
  void push(RolloutRecord record);
  void append(RolloutBuffer&& other);
  void clear() { records_.clear(); }

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return records_.empty(); }
  std::span<const RolloutRecord> records() const { return records_; }
  const RolloutRecord& operator[](std::size_t i) const { return records_[i]; }

 private:
  std::size_t capacity_;
  std::vector<RolloutRecord> records_;
};

class CollectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Environment instance plus the random stream it is driven by. Workers
/// persist across epochs so each keeps advancing its own stream.
struct RolloutWorker {
  int id = 0;
  std::mt19937_64 rng;
  std::unique_ptr<Environment> env;
};

std::vector<RolloutWorker> make_workers(const EnvFactory& factory, const TrainConfig& config);

struct EpisodeLog {
  double total_reward = 0.0;
  EpisodeMetrics metrics;
};

struct Rollouts {
  RolloutBuffer buffer{0};
  std::vector<EpisodeLog> episodes;  // in episode-index order
};

/// Rollout collection. Episode e runs on worker e % num_workers; workers run in
/// parallel against the fixed parameter snapshots and results merge in
/// episode order.
Rollouts collect_rollouts(std::vector<RolloutWorker>& workers,
                          const neural::NetworkParams& blue,
                          const neural::NetworkParams& red, const TrainConfig& config);

/// Convenience overload with fresh workers seeded from `config`.
Rollouts collect_rollouts(const EnvFactory& factory, const neural::NetworkParams& blue,
                          const neural::NetworkParams& red, const TrainConfig& config);

/// pi_B' Q pi_R: expectation of the joint Q matrix under both policies.
double expected_joint_value(const Eigen::Ref<const Eigen::MatrixXd>& q,
                            std::span<const double> blue_probs,
                            std::span<const double> red_probs);

/// y = r + discount * E_{pi_B, pi_R}[Q(s'_B, s'_R, ., .)], with the current
/// mask-respecting policies at the successor observations; y = r on
/// terminal records. Truncated records bootstrap when `bootstrap_on_truncation`.
std::vector<double> td_targets(std::span<const RolloutRecord> batch,
                               const neural::NetworkParams& critic,
                               const neural::NetworkParams& blue,
                               const neural::NetworkParams& red, double discount,
                               bool bootstrap_on_truncation = true);

struct CriticUpdateStats {
  double mean_loss = 0.0;  // mean Huber loss over the final pass
  int updates = 0;
  int skipped = 0;         // mini-batches rejected for non-finite gradients
};

/// Critic update: K passes of shuffled mini-batches (last partial batch kept);
/// Huber loss on the taken joint entry against the TD target.
CriticUpdateStats update_critic(neural::NetworkParams& critic, const RolloutBuffer& buffer,
                                const neural::NetworkParams& blue,
                                const neural::NetworkParams& red, const TrainConfig& config,
                                std::mt19937_64& rng);

/// Solves the critic stage game of every record under its masks.
/// Fans out over `threads` pure solver calls; output order matches input.
std::vector<StageEquilibrium> stage_equilibria(const neural::NetworkParams& critic,
                                               std::span<const RolloutRecord> batch,
                                               int threads = 1);

struct PolicyUpdateStats {
  double blue_loss = 0.0;
  double red_loss = 0.0;
  int updates = 0;
  int skipped = 0;
};

/// Policy update: one shuffled pass; each agent minimises the cross-entropy of its
/// policy against the fixed equilibrium strategy of every record.
PolicyUpdateStats update_policies(neural::NetworkParams& blue, neural::NetworkParams& red,
                                  const RolloutBuffer& buffer,
                                  std::span<const StageEquilibrium> equilibria,
                                  const TrainConfig& config, std::mt19937_64& rng);

struct EpochStats {
  int epoch = 0;
  double mean_reward = 0.0;  // Blue; Red's is the negation
  double std_reward = 0.0;
  double critic_loss = 0.0;
  double blue_policy_loss = 0.0;
  double red_policy_loss = 0.0;
  double mean_attack_attempts = 0.0;
  double mean_impacts = 0.0;
  std::array<double, kNumActionCategories> blue_action_freq{};
  std::array<double, kNumActionCategories> red_action_freq{};
  int skipped_updates = 0;
};

/// Fresh networks for an environment: policy_blue, policy_red, critic
/// initialised in that order from one generator seeded with config.seed.
ModelSet init_models(const MarkovGameSpec& spec, const TrainConfig& config);

/// Runs collect / critic / policy epochs against persistent workers.
class Trainer {
 public:
  Trainer(EnvFactory factory, TrainConfig config);

  /// Collection, critic and policy updates once; returns the epoch's statistics.
  EpochStats run_epoch();

  const ModelSet& models() const { return models_; }
  ModelSet& models() { return models_; }
  const MarkovGameSpec& spec() const { return spec_; }
  const TrainConfig& config() const { return config_; }
  int epochs_done() const { return epoch_; }

 private:
  TrainConfig config_;
  MarkovGameSpec spec_;
  ModelSet models_;
  std::vector<RolloutWorker> workers_;
  std::mt19937_64 rng_;
  int epoch_ = 0;
};

struct TrainHooks {
  std::function<void(const EpochStats&)> on_epoch;
  std::function<void(int epoch, const ModelSet&)> on_checkpoint;
  int checkpoint_every = 50;
};

struct TrainReport {
  std::vector<EpochStats> rows;
  ModelSet final_models;
};

/// Loops `epochs` epochs. Checkpoints go out for the initial models
/// (epoch 0), every `checkpoint_every` epochs, and after the last epoch.
TrainReport train(const EnvFactory& factory, const TrainConfig& config, int epochs,
                  const TrainHooks& hooks = {});

}  // namespace nashq::train
