#include "nashq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "nashq/matrix_nash.hpp"
#include "nashq/tabular.hpp"

namespace nashq::verify {
namespace {

using Eigen::MatrixXd;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double lo, double hi) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * unit_draw(rng);
  }
  return m;
}

int random_dim(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(unit_draw(rng) * (hi - lo + 1));
}

// ---- matrix-nash -------------------------------------------------------

PropertyResult saddle_random(std::mt19937_64& rng) {
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    const auto game = PayoffMatrix::unmasked(
        random_matrix(rng, random_dim(rng, 2, 6), random_dim(rng, 2, 6), -10, 10));
    const auto rep = saddle_check(game, solve_zero_sum(game), 1e-6);
    worst = std::max({worst, rep.max_row_deviation, rep.max_col_deviation});
    failures += rep.pass ? 0 : 1;
  }
  return {"matrix-nash", "saddle point on random matrices", failures == 0,
          "max deviation " + fmt(worst)};
}

PropertyResult lp_matches_enumeration(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < 60; ++k) {
    const auto game = PayoffMatrix::unmasked(
        random_matrix(rng, random_dim(rng, 2, 4), random_dim(rng, 2, 4), -10, 10));
    worst = std::max(worst, std::abs(solve_zero_sum(game).value -
                                     support_enumeration(game).value));
  }
  return {"matrix-nash", "LP value equals support enumeration", worst <= 1e-8,
          "max |diff| " + fmt(worst)};
}

PropertyResult antisymmetry(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < 60; ++k) {
    const MatrixXd a = random_matrix(rng, random_dim(rng, 2, 6), random_dim(rng, 2, 6), -10, 10);
    const MatrixXd neg_t = -a.transpose();
    const double v = solve_zero_sum(PayoffMatrix::unmasked(a)).value;
    const double w = solve_zero_sum(PayoffMatrix::unmasked(neg_t)).value;
    worst = std::max(worst, std::abs(v + w));
  }
  return {"matrix-nash", "negated transpose negates the value", worst <= 1e-8,
          "max |v + w| " + fmt(worst)};
}

PropertyResult shift_scale(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < 60; ++k) {
    const MatrixXd a = random_matrix(rng, random_dim(rng, 2, 6), random_dim(rng, 2, 6), -10, 10);
    const double c = 0.5 + 4.5 * unit_draw(rng);
    const double d = -20.0 + 40.0 * unit_draw(rng);
    const double v = solve_zero_sum(PayoffMatrix::unmasked(a)).value;
    const MatrixXd b = (c * a).array() + d;
    const double w = solve_zero_sum(PayoffMatrix::unmasked(b)).value;
    worst = std::max(worst, std::abs(w - (c * v + d)));
  }
  return {"matrix-nash", "affine payoff change maps the value", worst <= 1e-7,
          "max error " + fmt(worst)};
}

PropertyResult masked_zero(std::mt19937_64& rng) {
  int violations = 0;
  int saddle_failures = 0;
  for (int k = 0; k < 100; ++k) {
    PayoffMatrix game;
    game.values = random_matrix(rng, random_dim(rng, 2, 6), random_dim(rng, 2, 6), -10, 10);
    game.row_mask.assign(static_cast<std::size_t>(game.rows()), 0);
    game.col_mask.assign(static_cast<std::size_t>(game.cols()), 0);
    for (auto& m : game.row_mask) m = unit_draw(rng) < 0.6;
    for (auto& m : game.col_mask) m = unit_draw(rng) < 0.6;
    game.row_mask[static_cast<std::size_t>(random_dim(rng, 0, game.rows() - 1))] = 1;
    game.col_mask[static_cast<std::size_t>(random_dim(rng, 0, game.cols() - 1))] = 1;
    const auto eq = solve_zero_sum(game);
    for (std::size_t i = 0; i < game.row_mask.size(); ++i) {
      if (game.row_mask[i] == 0 && eq.blue.probs[i] != 0.0) ++violations;
    }
    for (std::size_t j = 0; j < game.col_mask.size(); ++j) {
      if (game.col_mask[j] == 0 && eq.red.probs[j] != 0.0) ++violations;
    }
    if (!saddle_check(game, eq, 1e-6).pass) ++saddle_failures;
  }
  return {"matrix-nash", "masked actions get exactly zero", violations == 0 && saddle_failures == 0,
          std::to_string(violations) + " nonzero masked entries, " +
              std::to_string(saddle_failures) + " saddle failures"};
}

// ---- neural ------------------------------------------------------------

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Central differences over every parameter of `params` for a scalar loss of
// the network output; returns the worst relative error against `analytic`.
template <typename LossFn>
double gradient_check(neural::NetworkParams params, const MatrixXd& x,
                      const neural::LayerTensors& analytic, LossFn loss) {
  const double h = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& p, double g) {
    const double saved = p;
    p = saved + h;
    const double up = loss(neural::forward(params, x));
    p = saved - h;
    const double down = loss(neural::forward(params, x));
    p = saved;
    worst = std::max(worst, relative_error(g, (up - down) / (2.0 * h)));
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      probe(layer.weight.data()[i], analytic[l].weight.data()[i]);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      probe(layer.bias.data()[i], analytic[l].bias.data()[i]);
    }
  }
  return worst;
}

PropertyResult policy_gradient(std::mt19937_64& rng) {
  const neural::MlpSpec spec{6, {8, 8}, 5};
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const auto params = neural::NetworkParams::init(spec, rng);
    const int batch = 3;
    const MatrixXd x = random_matrix(rng, spec.input_dim, batch, -1, 1);
    std::vector<MixedStrategy> targets;
    std::vector<ActionMask> masks;
    for (int b = 0; b < batch; ++b) {
      ActionMask m(5, 1);
      m[static_cast<std::size_t>(random_dim(rng, 1, 4))] = static_cast<std::uint8_t>(b % 2);
      std::vector<double> p(5, 0.0);
      double total = 0.0;
      for (std::size_t a = 0; a < 5; ++a) {
        if (m[a] != 0) total += (p[a] = 0.1 + unit_draw(rng));
      }
      for (double& v : p) v /= total;
      targets.push_back({p, m});
      masks.push_back(m);
    }
    auto loss = [&](const MatrixXd& out) {
      double total = 0.0;
      for (int b = 0; b < batch; ++b) {
        const auto pi = neural::masked_softmax(
            std::span<const double>(out.col(b).data(), 5), masks[static_cast<std::size_t>(b)]);
        total += neural::cross_entropy_loss(pi, targets[static_cast<std::size_t>(b)]).loss;
      }
      return total;
    };
    neural::ForwardCache cache;
    const MatrixXd out = neural::forward(params, x, &cache);
    MatrixXd up = MatrixXd::Zero(5, batch);
    for (int b = 0; b < batch; ++b) {
      const auto pi = neural::masked_softmax(std::span<const double>(out.col(b).data(), 5),
                                             masks[static_cast<std::size_t>(b)]);
      const auto ce = neural::cross_entropy_loss(pi, targets[static_cast<std::size_t>(b)]);
      for (int a = 0; a < 5; ++a) up(a, b) = ce.grad_logits[static_cast<std::size_t>(a)];
    }
    worst = std::max(worst, gradient_check(params, x, neural::backward(params, cache, up), loss));
  }
  return {"neural", "policy cross-entropy gradient check", worst < 1e-4,
          "max relative error " + fmt(worst)};
}

PropertyResult critic_gradient(std::mt19937_64& rng, const HuberFn& huber) {
  const neural::MlpSpec spec{7, {10, 10}, 9};
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const auto params = neural::NetworkParams::init(spec, rng);
    const int batch = 4;
    const MatrixXd x = random_matrix(rng, spec.input_dim, batch, -1, 1);
    std::vector<int> entry(batch);
    std::vector<double> target(batch);
    for (int b = 0; b < batch; ++b) {
      entry[static_cast<std::size_t>(b)] = random_dim(rng, 0, 8);
      // Alternate between the quadratic and linear regions.
      target[static_cast<std::size_t>(b)] = (b % 2 == 0 ? 0.3 : 4.0) * (2.0 * unit_draw(rng) - 1.0);
    }
    auto loss = [&](const MatrixXd& out) {
      double total = 0.0;
      for (int b = 0; b < batch; ++b) {
        total += huber(out(entry[static_cast<std::size_t>(b)], b), target[static_cast<std::size_t>(b)], 1.0).loss;
      }
      return total;
    };
    neural::ForwardCache cache;
    const MatrixXd out = neural::forward(params, x, &cache);
    MatrixXd up = MatrixXd::Zero(9, batch);
    for (int b = 0; b < batch; ++b) {
      const int e = entry[static_cast<std::size_t>(b)];
      up(e, b) = huber(out(e, b), target[static_cast<std::size_t>(b)], 1.0).grad;
    }
    worst = std::max(worst, gradient_check(params, x, neural::backward(params, cache, up), loss));
  }
  return {"neural", "critic Huber gradient check", worst < 1e-4,
          "max relative error " + fmt(worst)};
}

PropertyResult softmax_masks(std::mt19937_64& rng) {
  int violations = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = random_dim(rng, 2, 21);
    std::vector<double> logits(static_cast<std::size_t>(n));
    ActionMask mask(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      logits[static_cast<std::size_t>(i)] = -50 + 100 * unit_draw(rng);
      mask[static_cast<std::size_t>(i)] = unit_draw(rng) < 0.5;
    }
    mask[static_cast<std::size_t>(random_dim(rng, 0, n - 1))] = 1;
    const auto pi = neural::masked_softmax(logits, mask);
    if (!pi.is_valid(1e-12)) ++violations;
  }
  return {"neural", "masked softmax is a valid masked distribution", violations == 0,
          std::to_string(violations) + " violations"};
}

PropertyResult adam_rejects_nonfinite(std::mt19937_64& rng) {
  auto params = neural::NetworkParams::init({3, {4}, 2}, rng);
  const auto before = params.layers;
  auto grads = neural::zeros_like(params);
  grads[0].weight(0, 0) = std::numeric_limits<double>::quiet_NaN();
  bool threw = false;
  try {
    neural::adam_step(params, grads, {});
  } catch (const neural::GradientOverflowError&) {
    threw = true;
  }
  bool unchanged = params.step_count == 0;
  for (std::size_t l = 0; l < before.size(); ++l) {
    unchanged = unchanged && params.layers[l].weight == before[l].weight &&
                params.layers[l].bias == before[l].bias;
  }
  return {"neural", "Adam rejects non-finite gradients", threw && unchanged,
          threw ? (unchanged ? "rejected, parameters untouched" : "parameters modified")
                : "accepted NaN gradient"};
}

// ---- tabular -----------------------------------------------------------

tabular::TabularGame random_game(std::mt19937_64& rng, int states, int nb, int nr, double discount) {
  tabular::TabularGame g;
  g.name = "random";
  g.num_blue_actions = nb;
  g.num_red_actions = nr;
  g.discount = discount;
  for (int s = 0; s < states; ++s) {
    g.payoff.push_back(random_matrix(rng, nb, nr, -1, 1));
    std::vector<std::vector<double>> rows;
    for (int a = 0; a < nb * nr; ++a) {
      std::vector<double> p(static_cast<std::size_t>(states));
      double total = 0.0;
      for (double& v : p) total += (v = unit_draw(rng) + 0.01);
      for (double& v : p) v /= total;
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) sum += p[i];
      p.back() = 1.0 - sum;
      rows.push_back(p);
    }
    g.transition.push_back(rows);
  }
  return g;
}

tabular::TabularGame swap_roles(const tabular::TabularGame& g) {
  tabular::TabularGame out = g;
  out.num_blue_actions = g.num_red_actions;
  out.num_red_actions = g.num_blue_actions;
  for (int s = 0; s < g.num_states(); ++s) {
    const auto su = static_cast<std::size_t>(s);
    out.payoff[su] = -g.payoff[su].transpose();
    for (int b = 0; b < g.num_blue_actions; ++b) {
      for (int r = 0; r < g.num_red_actions; ++r) {
        out.transition[su][static_cast<std::size_t>(r * g.num_blue_actions + b)] =
            g.transition[su][static_cast<std::size_t>(b * g.num_red_actions + r)];
      }
    }
  }
  return out;
}

PropertyResult shapley_contraction(std::mt19937_64& rng) {
  bool ok = true;
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto g = random_game(rng, 3, 3, 2, 0.8);
    const auto res = tabular::shapley_value_iteration(g, 1e-10, 1000);
    for (std::size_t i = 1; i < res.residuals.size(); ++i) {
      const double excess = res.residuals[i] - (g.discount * res.residuals[i - 1] + 1e-9);
      worst = std::max(worst, excess);
      ok = ok && excess <= 0.0;
    }
  }
  return {"tabular", "Shapley residual contracts geometrically", ok,
          "worst excess " + fmt(worst)};
}

PropertyResult bellman_consistency(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto g = random_game(rng, 3, 2, 3, 0.7);
    const auto res = tabular::shapley_value_iteration(g, 1e-12, 2000);
    const auto q = tabular::q_from_values(g, res.value.values);
    for (int s = 0; s < g.num_states(); ++s) {
      worst = std::max(worst, std::abs(tabular::nash_value(q, s) -
                                       res.value.values[static_cast<std::size_t>(s)]));
    }
  }
  return {"tabular", "oracle Q has stage values equal to V", worst <= 1e-9,
          "max error " + fmt(worst)};
}

PropertyResult role_swap(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto g = random_game(rng, 3, 3, 2, 0.75);
    const auto a = tabular::shapley_value_iteration(g, 1e-12, 2000);
    const auto b = tabular::shapley_value_iteration(swap_roles(g), 1e-12, 2000);
    for (std::size_t s = 0; s < a.value.values.size(); ++s) {
      worst = std::max(worst, std::abs(a.value.values[s] + b.value.values[s]));
    }
  }
  return {"tabular", "swapping roles negates V", worst <= 1e-9, "max |V + V'| " + fmt(worst)};
}

PropertyResult sweeps_reach_oracle(std::mt19937_64& rng) {
  const auto g = random_game(rng, 3, 2, 2, 0.6);
  const auto oracle = tabular::shapley_value_iteration(g, 1e-13, 2000);
  const auto q_star = tabular::q_from_values(g, oracle.value.values);
  auto q = tabular::QTable::zeros(g);
  // Expected-target sweeps: alpha = 1 with the exact expected continuation.
  for (int sweep = 0; sweep < 200; ++sweep) {
    std::vector<double> v;
    for (int s = 0; s < g.num_states(); ++s) v.push_back(tabular::nash_value(q, s));
    q = tabular::q_from_values(g, v);
  }
  double worst = 0.0;
  for (int s = 0; s < g.num_states(); ++s) {
    worst = std::max(worst, (q.values[static_cast<std::size_t>(s)] -
                             q_star.values[static_cast<std::size_t>(s)]).cwiseAbs().maxCoeff());
  }
  // nashq_update with alpha = 1 reproduces the same backup entry by entry.
  const auto one = tabular::nashq_update(q, 0, 1, 0, 0.25, 2, 1.0, g.discount);
  const double expected = 0.25 + g.discount * tabular::nash_value(q, 2);
  const double update_err = std::abs(one.values[0](1, 0) - expected);
  return {"tabular", "exact-target sweeps reach oracle Q", worst <= 1e-6 && update_err == 0.0,
          "max |Q - Q*| " + fmt(worst)};
}

}  // namespace

std::vector<PropertyResult> run_suites(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<PropertyResult> out;
  auto guarded = [&](const char* suite, const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({suite, name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("matrix-nash", "saddle point on random matrices", [&] { return saddle_random(rng); });
  guarded("matrix-nash", "LP value equals support enumeration", [&] { return lp_matches_enumeration(rng); });
  guarded("matrix-nash", "negated transpose negates the value", [&] { return antisymmetry(rng); });
  guarded("matrix-nash", "affine payoff change maps the value", [&] { return shift_scale(rng); });
  guarded("matrix-nash", "masked actions get exactly zero", [&] { return masked_zero(rng); });
  guarded("neural", "policy cross-entropy gradient check", [&] { return policy_gradient(rng); });
  guarded("neural", "critic Huber gradient check", [&] { return critic_gradient(rng, options.huber); });
  guarded("neural", "masked softmax is a valid masked distribution", [&] { return softmax_masks(rng); });
  guarded("neural", "Adam rejects non-finite gradients", [&] { return adam_rejects_nonfinite(rng); });
  guarded("tabular", "Shapley residual contracts geometrically", [&] { return shapley_contraction(rng); });
  guarded("tabular", "oracle Q has stage values equal to V", [&] { return bellman_consistency(rng); });
  guarded("tabular", "swapping roles negates V", [&] { return role_swap(rng); });
  guarded("tabular", "exact-target sweeps reach oracle Q", [&] { return sweeps_reach_oracle(rng); });
  return out;
}

std::string format_report(const std::vector<PropertyResult>& results) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-48s %-5s %s\n", "suite", "property", "result", "detail");
  os << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-12s %-48s %-5s %s\n", r.suite.c_str(), r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.detail.c_str());
    os << line;
  }
  return os.str();
}

bool all_pass(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

}  // namespace nashq::verify
