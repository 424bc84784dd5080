#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nashq/game_core.hpp"
#include "nashq/matrix_nash.hpp"

namespace nashq::neural {

enum class Activation { kRelu };

/// Fully connected ReLU network shape. The output layer is linear.
struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims;
  int output_dim = 1;
  Activation activation = Activation::kRelu;

  void validate() const;
  bool operator==(const MlpSpec&) const = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Per-layer tensors shaped like a network's parameters.
using LayerTensors = std::vector<DenseLayer>;

/// Network parameters plus Adam moment estimates.
struct NetworkParams {
  LayerTensors layers;
  LayerTensors adam_m;
  LayerTensors adam_v;
  std::int64_t step_count = 0;

  /// He-uniform weights, zero biases, zero moments.
  static NetworkParams init(const MlpSpec& spec, std::mt19937_64& rng);
  /// All parameters and moments zero.
  static NetworkParams zeros(const MlpSpec& spec);

  int input_dim() const { return static_cast<int>(layers.front().weight.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().weight.rows()); }
  MlpSpec spec() const;
  std::size_t parameter_count() const;
};

/// Zero tensors shaped like `params.layers`.
LayerTensors zeros_like(const NetworkParams& params);

/// Activations kept from a forward pass for use by `backward`.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;  // input to layer l, (in x batch)
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of layer l, (out x batch)
};

/// Batched forward pass; each column of `x` is one sample. Fills `cache`
/// when given.
Eigen::MatrixXd forward(const NetworkParams& params, const Eigen::MatrixXd& x,
                        ForwardCache* cache = nullptr);

/// Exact gradient of a scalar loss given dLoss/dOutput (`upstream`, out x
/// batch), summed over the batch. ReLU'(0) is taken as 0.
LayerTensors backward(const NetworkParams& params, const ForwardCache& cache,
                      const Eigen::MatrixXd& upstream);

/// Softmax over mask-valid logits; masked entries get exactly 0.
MixedStrategy masked_softmax(std::span<const double> logits, const ActionMask& mask);

/// pi(.|obs) = masked softmax of the network logits.
MixedStrategy policy_forward(const NetworkParams& params, std::span<const double> obs,
                             const ActionMask& mask);

/// Runs the critic on concat(blue_obs, red_obs) and reshapes the
/// num_blue * num_red outputs row-major into Blue's payoff matrix. Masks are
/// all-valid; callers overwrite them as needed.
PayoffMatrix critic_forward(const NetworkParams& params, std::span<const double> blue_obs,
                            std::span<const double> red_obs, int num_blue_actions,
                            int num_red_actions);

struct CrossEntropyResult {
  double loss = 0.0;
  std::vector<double> grad_logits;  // d loss / d pre-softmax logits
};

/// Clamp applied inside the log of the cross-entropy.
inline constexpr double kLogClamp = 1e-12;

/// -sum target(a) log max(policy(a), 1e-12) over valid actions, with
/// gradient (policy - target) on valid logits and 0 on masked ones.
CrossEntropyResult cross_entropy_loss(const MixedStrategy& policy,
                                      const MixedStrategy& target);

struct HuberResult {
  double loss = 0.0;
  double grad = 0.0;  // d loss / d prediction
};

HuberResult huber_loss(double prediction, double target, double delta);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class GradientOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True iff every gradient entry is finite.
bool all_finite(const LayerTensors& grads);

/// Bias-corrected Adam update in place. Rejects non-finite gradients with
/// GradientOverflowError and leaves `params` untouched in that case.
void adam_step(NetworkParams& params, const LayerTensors& grads, const AdamConfig& config);

}  // namespace nashq::neural
