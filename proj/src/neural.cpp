#include "nashq/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nashq::neural {
namespace {

std::vector<int> layer_dims(const MlpSpec& spec) {
  std::vector<int> dims;
  dims.push_back(spec.input_dim);
  dims.insert(dims.end(), spec.hidden_dims.begin(), spec.hidden_dims.end());
  dims.push_back(spec.output_dim);
  return dims;
}

void check_batch_shape(const NetworkParams& params, const Eigen::MatrixXd& x) {
  if (params.layers.empty()) {
    throw std::invalid_argument("forward: network has no layers");
  }
  if (x.rows() != params.input_dim()) {
    throw std::invalid_argument("forward: input dim " + std::to_string(x.rows()) +
                                " does not match network input dim " +
                                std::to_string(params.input_dim()));
  }
}

}  // namespace

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1) {
    throw std::invalid_argument("MlpSpec: input and output dims must be >= 1");
  }
  if (hidden_dims.empty()) {
    throw std::invalid_argument("MlpSpec: at least one hidden layer is required");
  }
  for (int h : hidden_dims) {
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
  }
}

NetworkParams NetworkParams::zeros(const MlpSpec& spec) {
  spec.validate();
  const auto dims = layer_dims(spec);
  NetworkParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer{Eigen::MatrixXd::Zero(dims[l + 1], dims[l]),
                     Eigen::VectorXd::Zero(dims[l + 1])};
    p.layers.push_back(layer);
    p.adam_m.push_back(layer);
    p.adam_v.push_back(layer);
  }
  return p;
}

NetworkParams NetworkParams::init(const MlpSpec& spec, std::mt19937_64& rng) {
  NetworkParams p = zeros(spec);
  for (auto& layer : p.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = dist(rng);
    }
  }
  return p;
}

MlpSpec NetworkParams::spec() const {
  MlpSpec s;
  s.input_dim = input_dim();
  s.output_dim = output_dim();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    s.hidden_dims.push_back(static_cast<int>(layers[l].weight.rows()));
  }
  return s;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

LayerTensors zeros_like(const NetworkParams& params) {
  LayerTensors out;
  out.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    out.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                   Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

Eigen::MatrixXd forward(const NetworkParams& params, const Eigen::MatrixXd& x,
                        ForwardCache* cache) {
  check_batch_shape(params, x);
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Eigen::MatrixXd act = x;
  const std::size_t last = params.layers.size() - 1;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Eigen::MatrixXd z = layer.weight * act;
    z.colwise() += layer.bias;
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(act));
      cache->pre.push_back(z);
    }
    act = (l == last) ? std::move(z) : Eigen::MatrixXd(z.cwiseMax(0.0));
  }
  return act;
}

LayerTensors backward(const NetworkParams& params, const ForwardCache& cache,
                      const Eigen::MatrixXd& upstream) {
  const std::size_t n_layers = params.layers.size();
  if (cache.inputs.size() != n_layers || cache.pre.size() != n_layers) {
    throw std::invalid_argument("backward: cache does not match network depth");
  }
  if (upstream.rows() != params.output_dim() ||
      upstream.cols() != cache.pre.back().cols()) {
    throw std::invalid_argument("backward: upstream gradient shape does not match cache");
  }

  LayerTensors grads(n_layers);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = n_layers; k-- > 0;) {
    const auto& layer = params.layers[k];
    if (cache.inputs[k].rows() != layer.weight.cols()) {
      throw std::invalid_argument("backward: cached input shape mismatch at layer " +
                                  std::to_string(k));
    }
    grads[k].weight = delta * cache.inputs[k].transpose();
    grads[k].bias = delta.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd back = layer.weight.transpose() * delta;
      delta = (cache.pre[k - 1].array() > 0.0).select(back, 0.0);
    }
  }
  return grads;
}

MixedStrategy masked_softmax(std::span<const double> logits, const ActionMask& mask) {
  if (logits.size() != mask.size()) {
    throw std::invalid_argument("masked_softmax: logits/mask length mismatch");
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i] != 0) max_logit = std::max(max_logit, logits[i]);
  }
  if (max_logit == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("masked_softmax: mask has no valid action");
  }
  MixedStrategy out;
  out.mask = mask;
  out.probs.assign(logits.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i] == 0) continue;
    out.probs[i] = std::exp(logits[i] - max_logit);
    total += out.probs[i];
  }
  for (auto& p : out.probs) p /= total;
  return out;
}

MixedStrategy policy_forward(const NetworkParams& params, std::span<const double> obs,
                             const ActionMask& mask) {
  if (mask.size() != static_cast<std::size_t>(params.output_dim())) {
    throw std::invalid_argument("policy_forward: mask length " +
                                std::to_string(mask.size()) +
                                " does not match action count " +
                                std::to_string(params.output_dim()));
  }
  if (count_valid(mask) == 0) {
    throw std::invalid_argument("policy_forward: mask has no valid action");
  }
  const Eigen::Map<const Eigen::VectorXd> x(obs.data(), static_cast<Eigen::Index>(obs.size()));
  const Eigen::MatrixXd logits = forward(params, x);
  return masked_softmax(std::span<const double>(logits.data(), logits.size()), mask);
}

PayoffMatrix critic_forward(const NetworkParams& params, std::span<const double> blue_obs,
                            std::span<const double> red_obs, int num_blue_actions,
                            int num_red_actions) {
  if (params.output_dim() != num_blue_actions * num_red_actions) {
    throw std::invalid_argument("critic_forward: output dim " +
                                std::to_string(params.output_dim()) + " is not " +
                                std::to_string(num_blue_actions) + "x" +
                                std::to_string(num_red_actions));
  }
  Eigen::VectorXd x(blue_obs.size() + red_obs.size());
  std::copy(blue_obs.begin(), blue_obs.end(), x.data());
  std::copy(red_obs.begin(), red_obs.end(), x.data() + blue_obs.size());
  const Eigen::MatrixXd out = forward(params, x);

  Eigen::MatrixXd q(num_blue_actions, num_red_actions);
  for (int b = 0; b < num_blue_actions; ++b) {
    for (int r = 0; r < num_red_actions; ++r) q(b, r) = out(b * num_red_actions + r, 0);
  }
  return PayoffMatrix::unmasked(std::move(q));
}

CrossEntropyResult cross_entropy_loss(const MixedStrategy& policy,
                                      const MixedStrategy& target) {
  if (policy.mask != target.mask || policy.probs.size() != target.probs.size() ||
      policy.probs.size() != policy.mask.size()) {
    throw std::invalid_argument("cross_entropy_loss: policy and target masks differ");
  }
  CrossEntropyResult r;
  r.grad_logits.assign(policy.probs.size(), 0.0);
  for (std::size_t a = 0; a < policy.probs.size(); ++a) {
    if (policy.mask[a] == 0) continue;
    if (target.probs[a] > 0.0) {
      r.loss -= target.probs[a] * std::log(std::max(policy.probs[a], kLogClamp));
    }
    r.grad_logits[a] = policy.probs[a] - target.probs[a];
  }
  return r;
}

HuberResult huber_loss(double prediction, double target, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("huber_loss: delta must be positive");
  }
  const double e = prediction - target;
  if (std::abs(e) <= delta) return {0.5 * e * e, e};
  return {delta * (std::abs(e) - 0.5 * delta), e > 0.0 ? delta : -delta};
}

bool all_finite(const LayerTensors& grads) {
  return std::all_of(grads.begin(), grads.end(), [](const DenseLayer& g) {
    return g.weight.allFinite() && g.bias.allFinite();
  });
}

void adam_step(NetworkParams& params, const LayerTensors& grads, const AdamConfig& config) {
  if (grads.size() != params.layers.size()) {
    throw std::invalid_argument("adam_step: gradient depth mismatch");
  }
  for (std::size_t l = 0; l < grads.size(); ++l) {
    if (grads[l].weight.rows() != params.layers[l].weight.rows() ||
        grads[l].weight.cols() != params.layers[l].weight.cols() ||
        grads[l].bias.size() != params.layers[l].bias.size()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch at layer " +
                                  std::to_string(l));
    }
  }
  if (!all_finite(grads)) {
    throw GradientOverflowError("adam_step: non-finite gradient, update rejected");
  }

  const auto t = static_cast<double>(params.step_count + 1);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  // Moments of never-used outputs decay geometrically; flushing them at the
  // subnormal boundary keeps late-training steps at full speed.
  const auto flush = [](double x) {
    return std::abs(x) < std::numeric_limits<double>::min() ? 0.0 : x;
  };
  auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    m = (config.beta1 * m + (1.0 - config.beta1) * g).unaryExpr(flush);
    v = (config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g)).unaryExpr(flush);
    theta.array() -= config.lr * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + config.eps);
  };
  for (std::size_t l = 0; l < grads.size(); ++l) {
    update(params.layers[l].weight, params.adam_m[l].weight, params.adam_v[l].weight,
           grads[l].weight);
    update(params.layers[l].bias, params.adam_m[l].bias, params.adam_v[l].bias,
           grads[l].bias);
  }
  ++params.step_count;
}

}  // namespace nashq::neural
