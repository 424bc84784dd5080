#include "nashq/train.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

namespace nashq::train {
namespace {

using neural::NetworkParams;

Eigen::MatrixXd stack_columns(std::span<const RolloutRecord> batch,
                              const std::vector<std::size_t>& index,
                              const std::vector<double> RolloutRecord::*first,
                              const std::vector<double> RolloutRecord::*second = nullptr) {
  const auto& r0 = batch[index.front()];
  const auto rows = static_cast<Eigen::Index>((r0.*first).size() +
                                              (second != nullptr ? (r0.*second).size() : 0));
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(index.size()));
  for (std::size_t c = 0; c < index.size(); ++c) {
    const auto& rec = batch[index[c]];
    const auto& a = rec.*first;
    if (static_cast<Eigen::Index>(a.size() + (second != nullptr ? (rec.*second).size() : 0)) !=
        rows) {
      throw std::invalid_argument("observation length differs across records");
    }
    std::copy(a.begin(), a.end(), x.col(static_cast<Eigen::Index>(c)).data());
    if (second != nullptr) {
      const auto& b = rec.*second;
      std::copy(b.begin(), b.end(), x.col(static_cast<Eigen::Index>(c)).data() + a.size());
    }
  }
  return x;
}

std::vector<std::size_t> iota_index(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

// Fisher-Yates driven by unit_draw so the permutation does not depend on
// the standard library's distribution implementations.
void shuffle(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(i));
    std::swap(idx[i - 1], idx[std::min(j, i - 1)]);
  }
}

std::vector<std::vector<std::size_t>> minibatches(std::vector<std::size_t> order,
                                                  int batch_size) {
  std::vector<std::vector<std::size_t>> out;
  const auto b = static_cast<std::size_t>(batch_size);
  for (std::size_t start = 0; start < order.size(); start += b) {
    const std::size_t end = std::min(order.size(), start + b);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

MixedStrategy sample_policy(const NetworkParams& params, const std::vector<double>& obs,
                            const ActionMask& mask) {
  return neural::policy_forward(params, obs, mask);
}

neural::AdamConfig adam_config(const TrainConfig& c, double lr) {
  return {lr, c.adam_beta1, c.adam_beta2, c.adam_eps};
}

// Runs `fn(i)` for i in [0, n) across up to `threads` threads.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto t = static_cast<std::size_t>(std::max(1, threads));
  if (t == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(t);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < t; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += t) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("train." + field + " " + why);
  };
  if (!(discount >= 0.0 && discount < 1.0)) fail("discount", "must lie in [0, 1)");
  if (critic_epochs < 1) fail("critic_epochs", "must be positive");
  if (rollout_horizon < 1) fail("rollout_horizon", "must be positive");
  if (batch_size < 1) fail("batch_size", "must be positive");
  if (!(policy_lr > 0.0)) fail("policy_lr", "must be positive");
  if (!(critic_lr > 0.0)) fail("critic_lr", "must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) fail("adam_betas", "must lie in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) fail("adam_betas", "must lie in (0, 1)");
  if (!(adam_eps > 0.0)) fail("adam_eps", "must be positive");
  if (!(huber_delta > 0.0)) fail("huber_delta", "must be positive");
  if (num_workers < 1) fail("num_workers", "must be positive");
  if (episodes_per_epoch < 1) fail("episodes_per_epoch", "must be positive");
  if (episode_length < 1) fail("episode_length", "must be positive");
  if (policy_hidden.empty() || critic_hidden.empty()) fail("hidden", "needs at least one layer");
  for (int h : policy_hidden) {
    if (h < 1) fail("policy_hidden", "entries must be positive");
  }
  for (int h : critic_hidden) {
    if (h < 1) fail("critic_hidden", "entries must be positive");
  }
  const int per_worker = (episodes_per_epoch + num_workers - 1) / num_workers;
  if (static_cast<long long>(per_worker) * episode_length > rollout_horizon) {
    fail("rollout_horizon", "(" + std::to_string(rollout_horizon) +
                                ") is smaller than one worker's share of an epoch (" +
                                std::to_string(per_worker) + " episodes x " +
                                std::to_string(episode_length) + " steps)");
  }
}

std::uint64_t TrainConfig::worker_seed(int worker) const {
  return seed * 1'000'003ULL + static_cast<std::uint64_t>(worker);
}

bool RolloutRecord::operator==(const RolloutRecord& o) const {
  return blue_obs == o.blue_obs && red_obs == o.red_obs && blue_action == o.blue_action &&
         red_action == o.red_action && blue_policy.probs == o.blue_policy.probs &&
         blue_policy.mask == o.blue_policy.mask && red_policy.probs == o.red_policy.probs &&
         red_policy.mask == o.red_policy.mask && blue_reward == o.blue_reward &&
         next_blue_obs == o.next_blue_obs && next_red_obs == o.next_red_obs &&
         next_blue_mask == o.next_blue_mask && next_red_mask == o.next_red_mask &&
         done == o.done && truncated == o.truncated;
}

void RolloutBuffer::push(RolloutRecord record) {
  if (records_.size() >= capacity_) {
    throw std::length_error("RolloutBuffer: capacity " + std::to_string(capacity_) +
                            " exceeded");
  }
  records_.push_back(std::move(record));
}

void RolloutBuffer::append(RolloutBuffer&& other) {
  if (records_.size() + other.records_.size() > capacity_) {
    throw std::length_error("RolloutBuffer: capacity " + std::to_string(capacity_) +
                            " exceeded");
  }
  for (auto& r : other.records_) records_.push_back(std::move(r));
  other.records_.clear();
}

std::vector<RolloutWorker> make_workers(const EnvFactory& factory, const TrainConfig& config) {
  std::vector<RolloutWorker> workers;
  for (int i = 0; i < config.num_workers; ++i) {
    workers.push_back({i, std::mt19937_64(config.worker_seed(i)), factory()});
  }
  return workers;
}

Rollouts collect_rollouts(std::vector<RolloutWorker>& workers, const NetworkParams& blue,
                          const NetworkParams& red, const TrainConfig& config) {
  config.validate();
  const auto num_workers = static_cast<int>(workers.size());
  if (num_workers < 1) throw std::invalid_argument("collect_rollouts: no workers");

  struct WorkerOutput {
    std::vector<std::vector<RolloutRecord>> episodes;
    std::vector<EpisodeLog> logs;
    std::exception_ptr error;
  };
  std::vector<WorkerOutput> outputs(static_cast<std::size_t>(num_workers));

  auto run_worker = [&](int w) {
    auto& worker = workers[static_cast<std::size_t>(w)];
    auto& out = outputs[static_cast<std::size_t>(w)];
    int step_index = 0;
    try {
      for (int e = w; e < config.episodes_per_epoch; e += num_workers) {
        std::vector<RolloutRecord> records;
        records.reserve(static_cast<std::size_t>(config.episode_length));
        EpisodeLog log;
        StepOutcome current = worker.env->reset(worker.rng());
        for (int t = 0; t < config.episode_length; ++t, ++step_index) {
          RolloutRecord rec;
          rec.blue_policy = sample_policy(blue, current.blue_obs, current.blue_mask);
          rec.red_policy = sample_policy(red, current.red_obs, current.red_mask);
          rec.blue_action = sample_index(rec.blue_policy.probs, unit_draw(worker.rng));
          rec.red_action = sample_index(rec.red_policy.probs, unit_draw(worker.rng));
          StepOutcome next = worker.env->step({rec.blue_action, rec.red_action});

          log.total_reward += next.blue_reward;
          log.metrics = metrics_update(std::move(log.metrics),
                                       worker.env->blue_category(rec.blue_action),
                                       worker.env->red_category(rec.red_action),
                                       next.blue_reward, next.impact_attempted,
                                       next.impact_succeeded);

          rec.blue_obs = std::move(current.blue_obs);
          rec.red_obs = std::move(current.red_obs);
          rec.blue_reward = next.blue_reward;
          rec.next_blue_obs = next.blue_obs;
          rec.next_red_obs = next.red_obs;
          rec.next_blue_mask = next.blue_mask;
          rec.next_red_mask = next.red_mask;
          // The configured episode length is a horizon cutoff even when the
          // environment itself would continue.
          rec.done = next.done || t + 1 == config.episode_length;
          rec.truncated = rec.done && (next.truncated || !next.done);
          records.push_back(std::move(rec));

          if (next.done) break;
          current = std::move(next);
        }
        out.episodes.push_back(std::move(records));
        out.logs.push_back(std::move(log));
      }
    } catch (const std::exception& ex) {
      out.error = std::make_exception_ptr(CollectionError(
          "worker " + std::to_string(w) + " step " + std::to_string(step_index) + ": " +
          ex.what()));
    }
  };

  if (num_workers == 1) {
    run_worker(0);
  } else {
    std::vector<std::jthread> threads;
    for (int w = 0; w < num_workers; ++w) threads.emplace_back(run_worker, w);
  }
  for (auto& out : outputs) {
    if (out.error) std::rethrow_exception(out.error);
  }

  Rollouts result;
  const int per_worker = (config.episodes_per_epoch + num_workers - 1) / num_workers;
  result.buffer = RolloutBuffer(static_cast<std::size_t>(per_worker) *
                                static_cast<std::size_t>(config.episode_length) *
                                static_cast<std::size_t>(num_workers));
  for (int e = 0; e < config.episodes_per_epoch; ++e) {
    auto& out = outputs[static_cast<std::size_t>(e % num_workers)];
    const auto slot = static_cast<std::size_t>(e / num_workers);
    for (auto& rec : out.episodes[slot]) result.buffer.push(std::move(rec));
    result.episodes.push_back(std::move(out.logs[slot]));
  }
  return result;
}

Rollouts collect_rollouts(const EnvFactory& factory, const NetworkParams& blue,
                          const NetworkParams& red, const TrainConfig& config) {
  auto workers = make_workers(factory, config);
  return collect_rollouts(workers, blue, red, config);
}

double expected_joint_value(const Eigen::Ref<const Eigen::MatrixXd>& q,
                            std::span<const double> blue_probs,
                            std::span<const double> red_probs) {
  const Eigen::Map<const Eigen::VectorXd> pb(blue_probs.data(),
                                             static_cast<Eigen::Index>(blue_probs.size()));
  const Eigen::Map<const Eigen::VectorXd> pr(red_probs.data(),
                                             static_cast<Eigen::Index>(red_probs.size()));
  return pb.dot(q * pr);
}

std::vector<double> td_targets(std::span<const RolloutRecord> batch, const NetworkParams& critic,
                               const NetworkParams& blue, const NetworkParams& red,
                               double discount, bool bootstrap_on_truncation) {
  if (batch.empty()) throw std::invalid_argument("td_targets: empty batch");
  const int nb = blue.output_dim();
  const int nr = red.output_dim();
  const auto idx = iota_index(batch.size());

  const Eigen::MatrixXd blue_logits =
      neural::forward(blue, stack_columns(batch, idx, &RolloutRecord::next_blue_obs));
  const Eigen::MatrixXd red_logits =
      neural::forward(red, stack_columns(batch, idx, &RolloutRecord::next_red_obs));
  const Eigen::MatrixXd q_flat = neural::forward(
      critic,
      stack_columns(batch, idx, &RolloutRecord::next_blue_obs, &RolloutRecord::next_red_obs));
  if (q_flat.rows() != static_cast<Eigen::Index>(nb) * nr) {
    throw std::invalid_argument("td_targets: critic output is not |A_B| x |A_R|");
  }

  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& rec = batch[i];
    const bool bootstrap = !rec.done || (rec.truncated && bootstrap_on_truncation);
    if (!bootstrap) {
      y[i] = rec.blue_reward;
      continue;
    }
    const auto c = static_cast<Eigen::Index>(i);
    const MixedStrategy pb = neural::masked_softmax(
        std::span<const double>(blue_logits.col(c).data(), static_cast<std::size_t>(nb)),
        rec.next_blue_mask);
    const MixedStrategy pr = neural::masked_softmax(
        std::span<const double>(red_logits.col(c).data(), static_cast<std::size_t>(nr)),
        rec.next_red_mask);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        q(q_flat.col(c).data(), nb, nr);
    y[i] = rec.blue_reward + discount * expected_joint_value(q, pb.probs, pr.probs);
  }
  return y;
}

CriticUpdateStats update_critic(NetworkParams& critic, const RolloutBuffer& buffer,
                                const NetworkParams& blue, const NetworkParams& red,
                                const TrainConfig& config, std::mt19937_64& rng) {
  if (buffer.empty()) throw std::invalid_argument("update_critic: empty buffer");
  const auto records = buffer.records();
  const int nr = red.output_dim();
  const auto adam = adam_config(config, config.critic_lr);

  CriticUpdateStats stats;
  std::vector<double> targets;
  for (int pass = 0; pass < config.critic_epochs; ++pass) {
    if (pass == 0 || !config.frozen_targets) {
      targets = td_targets(records, critic, blue, red, config.discount,
                           config.bootstrap_on_truncation);
    }
    auto order = iota_index(records.size());
    shuffle(order, rng);
    double pass_loss = 0.0;
    for (const auto& mb : minibatches(std::move(order), config.batch_size)) {
      const Eigen::MatrixXd x =
          stack_columns(records, mb, &RolloutRecord::blue_obs, &RolloutRecord::red_obs);
      neural::ForwardCache cache;
      const Eigen::MatrixXd out = neural::forward(critic, x, &cache);
      Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(out.rows(), out.cols());
      const double inv_b = 1.0 / static_cast<double>(mb.size());
      for (std::size_t c = 0; c < mb.size(); ++c) {
        const auto& rec = records[mb[c]];
        const auto row = static_cast<Eigen::Index>(rec.blue_action * nr + rec.red_action);
        const auto col = static_cast<Eigen::Index>(c);
        const auto h = neural::huber_loss(out(row, col), targets[mb[c]], config.huber_delta);
        pass_loss += h.loss;
        upstream(row, col) = h.grad * inv_b;
      }
      const auto grads = neural::backward(critic, cache, upstream);
      try {
        neural::adam_step(critic, grads, adam);
        ++stats.updates;
      } catch (const neural::GradientOverflowError&) {
        ++stats.skipped;
      }
    }
    stats.mean_loss = pass_loss / static_cast<double>(records.size());
  }
  return stats;
}

std::vector<StageEquilibrium> stage_equilibria(const NetworkParams& critic,
                                               std::span<const RolloutRecord> batch,
                                               int threads) {
  if (batch.empty()) throw std::invalid_argument("stage_equilibria: empty batch");
  const auto idx = iota_index(batch.size());
  const Eigen::MatrixXd q_flat = neural::forward(
      critic, stack_columns(batch, idx, &RolloutRecord::blue_obs, &RolloutRecord::red_obs));
  const auto nb = static_cast<Eigen::Index>(batch.front().blue_policy.size());
  const auto nr = static_cast<Eigen::Index>(batch.front().red_policy.size());
  if (q_flat.rows() != nb * nr) {
    throw std::invalid_argument("stage_equilibria: critic output is not |A_B| x |A_R|");
  }

  std::vector<StageEquilibrium> out(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    PayoffMatrix game;
    game.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                 Eigen::RowMajor>>(
        q_flat.col(static_cast<Eigen::Index>(i)).data(), nb, nr);
    game.row_mask = batch[i].blue_mask();
    game.col_mask = batch[i].red_mask();
    try {
      out[i] = solve_zero_sum(game);
    } catch (const std::exception& e) {
      throw std::runtime_error("stage_equilibria: record " + std::to_string(i) + ": " +
                               e.what());
    }
  });
  return out;
}

PolicyUpdateStats update_policies(NetworkParams& blue, NetworkParams& red,
                                  const RolloutBuffer& buffer,
                                  std::span<const StageEquilibrium> equilibria,
                                  const TrainConfig& config, std::mt19937_64& rng) {
  const auto records = buffer.records();
  if (records.size() != equilibria.size()) {
    throw std::invalid_argument("update_policies: equilibria not aligned with buffer");
  }
  if (records.empty()) throw std::invalid_argument("update_policies: empty buffer");
  const auto adam = adam_config(config, config.policy_lr);

  // Cross-entropy step for one agent on one mini-batch; returns summed loss.
  auto agent_step = [&](NetworkParams& params, const std::vector<std::size_t>& mb,
                        const std::vector<double> RolloutRecord::*obs,
                        const MixedStrategy RolloutRecord::*behaviour,
                        const MixedStrategy StageEquilibrium::*target, int& skipped) {
    neural::ForwardCache cache;
    const Eigen::MatrixXd logits = neural::forward(params, stack_columns(records, mb, obs), &cache);
    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
    const double inv_b = 1.0 / static_cast<double>(mb.size());
    double loss = 0.0;
    for (std::size_t c = 0; c < mb.size(); ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      const ActionMask& mask = (records[mb[c]].*behaviour).mask;
      const MixedStrategy pi = neural::masked_softmax(
          std::span<const double>(logits.col(col).data(), static_cast<std::size_t>(logits.rows())),
          mask);
      const auto ce = neural::cross_entropy_loss(pi, equilibria[mb[c]].*target);
      loss += ce.loss;
      for (Eigen::Index a = 0; a < logits.rows(); ++a) {
        upstream(a, col) = ce.grad_logits[static_cast<std::size_t>(a)] * inv_b;
      }
    }
    const auto grads = neural::backward(params, cache, upstream);
    try {
      neural::adam_step(params, grads, adam);
    } catch (const neural::GradientOverflowError&) {
      ++skipped;
    }
    return loss;
  };

  PolicyUpdateStats stats;
  auto order = iota_index(records.size());
  shuffle(order, rng);
  double blue_total = 0.0;
  double red_total = 0.0;
  for (const auto& mb : minibatches(std::move(order), config.batch_size)) {
    blue_total += agent_step(blue, mb, &RolloutRecord::blue_obs, &RolloutRecord::blue_policy,
                             &StageEquilibrium::blue, stats.skipped);
    red_total += agent_step(red, mb, &RolloutRecord::red_obs, &RolloutRecord::red_policy,
                            &StageEquilibrium::red, stats.skipped);
    ++stats.updates;
  }
  stats.blue_loss = blue_total / static_cast<double>(records.size());
  stats.red_loss = red_total / static_cast<double>(records.size());
  return stats;
}

ModelSet init_models(const MarkovGameSpec& spec, const TrainConfig& config) {
  std::mt19937_64 rng(config.seed);
  neural::MlpSpec blue{spec.blue_obs_dim, config.policy_hidden, spec.num_blue_actions};
  neural::MlpSpec red{spec.red_obs_dim, config.policy_hidden, spec.num_red_actions};
  neural::MlpSpec critic{spec.blue_obs_dim + spec.red_obs_dim, config.critic_hidden,
                         spec.num_blue_actions * spec.num_red_actions};
  ModelSet m;
  m.policy_blue = NetworkParams::init(blue, rng);
  m.policy_red = NetworkParams::init(red, rng);
  m.critic = NetworkParams::init(critic, rng);
  return m;
}

Trainer::Trainer(EnvFactory factory, TrainConfig config) : config_(std::move(config)) {
  config_.validate();
  workers_ = make_workers(factory, config_);
  spec_ = workers_.front().env->spec();
  models_ = init_models(spec_, config_);
  // Separate stream for shuffling, distinct from every worker's stream.
  rng_.seed(config_.seed ^ 0x9E3779B97F4A7C15ULL);
}

EpochStats Trainer::run_epoch() {
  EpochStats stats;
  stats.epoch = ++epoch_;

  // Rollouts against a fixed snapshot of both policies.
  Rollouts rollouts = collect_rollouts(workers_, models_.policy_blue, models_.policy_red, config_);

  // Critic.
  const auto critic_stats = update_critic(models_.critic, rollouts.buffer, models_.policy_blue,
                                          models_.policy_red, config_, rng_);

  // Policies: equilibria from the post-update critic, fixed for the pass.
  const auto eqs = stage_equilibria(models_.critic, rollouts.buffer.records(), config_.num_workers);
  const auto policy_stats = update_policies(models_.policy_blue, models_.policy_red,
                                            rollouts.buffer, eqs, config_, rng_);

  std::vector<double> totals;
  double attempts = 0.0;
  double impacts = 0.0;
  std::array<double, kNumActionCategories> blue_counts{};
  std::array<double, kNumActionCategories> red_counts{};
  for (const auto& ep : rollouts.episodes) {
    totals.push_back(ep.total_reward);
    if (!ep.metrics.attack_attempts.empty()) {
      attempts += static_cast<double>(ep.metrics.attack_attempts.back());
      impacts += static_cast<double>(ep.metrics.successful_impacts.back());
    }
    for (std::size_t k = 0; k < kNumActionCategories; ++k) {
      blue_counts[k] += static_cast<double>(ep.metrics.blue_action_counts[k]);
      red_counts[k] += static_cast<double>(ep.metrics.red_action_counts[k]);
    }
  }
  const double n = static_cast<double>(totals.size());
  stats.mean_reward = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
  if (totals.size() >= 2) {
    std::vector<std::vector<double>> series;
    for (double r : totals) series.push_back({r});
    stats.std_reward = aggregate_series(series).std.front();
  }
  stats.mean_attack_attempts = attempts / n;
  stats.mean_impacts = impacts / n;
  const double steps = static_cast<double>(rollouts.buffer.size());
  for (std::size_t k = 0; k < kNumActionCategories; ++k) {
    stats.blue_action_freq[k] = blue_counts[k] / steps;
    stats.red_action_freq[k] = red_counts[k] / steps;
  }
  stats.critic_loss = critic_stats.mean_loss;
  stats.blue_policy_loss = policy_stats.blue_loss;
  stats.red_policy_loss = policy_stats.red_loss;
  stats.skipped_updates = critic_stats.skipped + policy_stats.skipped;
  return stats;
}

TrainReport train(const EnvFactory& factory, const TrainConfig& config, int epochs,
                  const TrainHooks& hooks) {
  if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  Trainer trainer(factory, config);
  TrainReport report;
  if (hooks.on_checkpoint) hooks.on_checkpoint(0, trainer.models());
  for (int e = 1; e <= epochs; ++e) {
    EpochStats row;
    try {
      row = trainer.run_epoch();
    } catch (const std::exception& ex) {
      throw std::runtime_error("epoch " + std::to_string(e) + ": " + ex.what());
    }
    if (hooks.on_epoch) hooks.on_epoch(row);
    report.rows.push_back(row);
    const bool cadence = hooks.checkpoint_every > 0 && e % hooks.checkpoint_every == 0;
    if (hooks.on_checkpoint && (cadence || e == epochs)) hooks.on_checkpoint(e, trainer.models());
  }
  report.final_models = trainer.models();
  return report;
}

}  // namespace nashq::train
