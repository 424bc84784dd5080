#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "nashq/cyber_env.hpp"
#include "nashq/io_util.hpp"

using namespace nashq;
using namespace nashq::cyber;

namespace {

std::vector<int> valid(const ActionMask& m) {
  std::vector<int> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] != 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

int pick(const ActionMask& m, std::mt19937_64& rng) {
  const auto v = valid(m);
  return v[rng() % v.size()];
}

}  // namespace

TEST_CASE("reset state, observations and masks") {
  const CyberConfig c;
  CyberEnv env(c);
  const auto o = env.reset(1);
  CHECK(o.blue_obs == std::vector<double>(20, 0.0));
  CHECK(valid(o.red_mask) == std::vector<int>{0, red_index(c, {RedKind::kScan, 0})});
  CHECK(valid(o.blue_mask).size() == 21);
  std::vector<double> red(30, 0.0);
  red[5 * 0 + 1] = 1.0;
  for (int h = 1; h < 5; ++h) red[static_cast<std::size_t>(5 * h)] = 1.0;
  CHECK(o.red_obs == red);
  CHECK(env.reset(1).red_obs == o.red_obs);
  CHECK_FALSE(o.done);
  CHECK(env.spec().num_blue_actions == 21);
  CHECK(env.spec().red_obs_dim == 30);
}

TEST_CASE("config validation") {
  CyberConfig c;
  c.num_hosts = 1;
  CHECK_THROWS_AS(CyberEnv{c}, std::invalid_argument);
  c = CyberConfig{};
  c.p_exploit = 1.2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = CyberConfig{};
  c.weights.impact = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("action index layout and names") {
  const CyberConfig c;
  CHECK(blue_index(c, {BlueKind::kSleep, -1}) == 0);
  CHECK(blue_index(c, {BlueKind::kAnalyse, 0}) == 1);
  CHECK(blue_index(c, {BlueKind::kRestore, 2}) == 1 + 5 + 2);
  CHECK(blue_index(c, {BlueKind::kBlock, 4}) == 20);
  CHECK(red_index(c, {RedKind::kImpact, 4}) == 20);
  for (int i = 0; i < 21; ++i) {
    CHECK(blue_index(c, decode_blue(c, i)) == i);
    CHECK(red_index(c, decode_red(c, i)) == i);
  }
  CHECK(blue_name(c, 0) == "Sleep");
  CHECK(blue_name(c, 8) == "Restore(2)");
  CHECK(red_name(c, 0) == "Discover");
  CHECK(red_name(c, 20) == "Impact(4)");
}

TEST_CASE("deterministic scan from reset") {
  const auto c = CyberConfig::deterministic();
  auto s = initial_state(c);
  std::mt19937_64 rng(0);
  const auto ev = apply_step(c, s, 0, red_index(c, {RedKind::kScan, 0}), rng);
  CHECK(s.red_level[0] == RedLevel::kScanned);
  CHECK(ev.blue_reward == 0.0);
  CHECK_FALSE(std::signbit(ev.blue_reward));
  CHECK(s.t == 1);
}

TEST_CASE("exploit onto a decoy fails, consumes the decoy and alerts") {
  const auto c = CyberConfig::deterministic();
  auto s = initial_state(c);
  s.red_level[0] = RedLevel::kScanned;
  std::mt19937_64 rng(0);
  apply_step(c, s, blue_index(c, {BlueKind::kDecoy, 0}), red_index(c, {RedKind::kExploit, 0}), rng);
  CHECK(s.red_level[0] == RedLevel::kScanned);
  CHECK(s.decoy[0] == 0);
  CHECK(s.alert[0] == 1);
  CHECK(encode_obs(s).blue[0] == 1.0);
}

TEST_CASE("exploit onto a block fails and Red observes the block") {
  const auto c = CyberConfig::deterministic();
  auto s = initial_state(c);
  s.red_level[0] = RedLevel::kScanned;
  std::mt19937_64 rng(0);
  const auto ev = apply_step(c, s, blue_index(c, {BlueKind::kBlock, 0}), red_index(c, {RedKind::kExploit, 0}), rng);
  CHECK(s.red_level[0] == RedLevel::kScanned);
  CHECK(s.block_observed[0] == 1);
  CHECK(s.alert[0] == 1);  // p_detect = 1
  CHECK(ev.blue_reward == -0.05);
  CHECK(encode_obs(s).red[25] == 1.0);
}

TEST_CASE("successful exploit, analyse, restore and rewards") {
  const auto c = CyberConfig::deterministic();
  auto s = initial_state(c);
  s.red_level[0] = RedLevel::kScanned;
  std::mt19937_64 rng(0);
  auto ev = apply_step(c, s, 0, red_index(c, {RedKind::kExploit, 0}), rng);
  CHECK(s.red_level[0] == RedLevel::kExploited);
  CHECK(s.alert[0] == 1);
  CHECK(ev.blue_reward == doctest::Approx(-0.1));
  ev = apply_step(c, s, blue_index(c, {BlueKind::kAnalyse, 0}), 0, rng);
  CHECK(s.alert[0] == 0);
  CHECK(encode_obs(s).blue[1] == 1.0);
  ev = apply_step(c, s, blue_index(c, {BlueKind::kRestore, 0}), 0, rng);
  CHECK(s.red_level[0] == RedLevel::kDiscovered);
  CHECK(s.analysed[0] == 0);
  CHECK(ev.blue_reward == doctest::Approx(-0.1));  // restore cost only
}

TEST_CASE("masked actions are contract violations") {
  const CyberConfig c;
  CyberEnv env(c);
  env.reset(3);
  CHECK_THROWS_AS(env.step({0, red_index(c, {RedKind::kImpact, 4})}), ContractViolation);
  CHECK_THROWS_AS(env.step({0, red_index(c, {RedKind::kExploit, 0})}), ContractViolation);
  CHECK_THROWS_AS(env.step({99, 0}), ContractViolation);
  auto s = initial_state(c);
  s.decoy[2] = 1;
  std::mt19937_64 rng(0);
  CHECK_THROWS_AS(apply_step(c, s, blue_index(c, {BlueKind::kDecoy, 2}), 0, rng), ContractViolation);
}

TEST_CASE("legal masks and B-line priorities") {
  const CyberConfig c;
  auto s = initial_state(c);
  CHECK(bline_policy(c, s) == red_index(c, {RedKind::kScan, 0}));
  s.red_level = {RedLevel::kPrivileged, RedLevel::kPrivileged, RedLevel::kExploited,
                 RedLevel::kDiscovered, RedLevel::kUnknown};
  CHECK(bline_policy(c, s) == red_index(c, {RedKind::kEscalate, 2}));
  s.red_level[4] = RedLevel::kPrivileged;
  CHECK(legal_mask(c, s).red[static_cast<std::size_t>(red_index(c, {RedKind::kImpact, 4}))] == 1);
  CHECK(bline_policy(c, s) == red_index(c, {RedKind::kImpact, 4}));
  s.red_level[4] = RedLevel::kPrivileged;
  s.red_level[3] = RedLevel::kPrivileged;
  CHECK(legal_mask(c, s).red[static_cast<std::size_t>(red_index(c, {RedKind::kImpact, 3}))] == 0);
}

TEST_CASE("idle Blue vs B-line: first impact at t = 19 and the checked-in trace") {
  const auto c = CyberConfig::deterministic();
  auto s = initial_state(c);
  std::mt19937_64 rng(0);
  std::string trace;
  int first_impact = -1;
  for (int t = 0; t < c.episode_length; ++t) {
    const int r = bline_policy(c, s);
    const auto ev = apply_step(c, s, 0, r, rng);
    if (ev.impact_succeeded && first_impact < 0) first_impact = t;
    trace += trace_line(c, t, 0, r, ev.blue_reward, s) + "\n";
    CHECK(ev.done == (t + 1 == c.episode_length));
  }
  CHECK(first_impact == 19);
  CHECK(trace == read_file(std::string(NASHQ_SOURCE_DIR) + "/tests/data/bline_idle_trace.txt"));
}

TEST_CASE("random play: zero-sum, one level per step, masks nonempty, privacy") {
  const CyberConfig c;
  std::mt19937_64 pick_rng(42);
  for (int ep = 0; ep < 30; ++ep) {
    CyberEnv env(c);
    auto o = env.reset(static_cast<std::uint64_t>(ep));
    for (int t = 0; t < c.episode_length; ++t) {
      CHECK(count_valid(o.blue_mask) >= 1);
      CHECK(count_valid(o.red_mask) >= 1);
      const auto before = env.state();
      const int b = pick(o.blue_mask, pick_rng);
      const int r = pick(o.red_mask, pick_rng);
      o = env.step({b, r});
      CHECK(o.blue_reward + o.red_reward() == 0.0);
      const auto& after = env.state();
      const bool restore = decode_blue(c, b).kind == BlueKind::kRestore;
      for (int h = 0; h < c.num_hosts; ++h) {
        const int d = static_cast<int>(after.red_level[h]) - static_cast<int>(before.red_level[h]);
        CHECK(d <= 1);
        if (d < 0) CHECK((restore && decode_blue(c, b).host == h));
      }
      // Blue's view is a function of alerts, analysed flags, decoys and blocks.
      auto hidden = after;
      for (auto& lv : hidden.red_level) lv = RedLevel::kUnknown;
      CHECK(encode_obs(hidden).blue == o.blue_obs);
    }
    CHECK(o.done);
    CHECK_THROWS_AS(env.step({0, 0}), ContractViolation);
  }
}

TEST_CASE("restore-on-alert never yields more impacts than idle Blue") {
  const CyberConfig c;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto run = [&](bool defend) {
      auto s = initial_state(c);
      std::mt19937_64 rng(seed);
      int impacts = 0;
      for (int t = 0; t < c.episode_length; ++t) {
        int b = 0;
        if (defend) {
          for (int h = 0; h < c.num_hosts; ++h) {
            if (s.alert[h] != 0) {
              b = blue_index(c, {BlueKind::kRestore, h});
              break;
            }
          }
        }
        impacts += apply_step(c, s, b, bline_policy(c, s), rng).impact_succeeded;
      }
      return impacts;
    };
    CHECK(run(true) <= run(false));
  }
}

TEST_CASE("same seed and actions give the same trajectory") {
  const CyberConfig c;
  std::mt19937_64 a(9);
  std::mt19937_64 b(9);
  CyberEnv e1(c);
  CyberEnv e2(c);
  auto o1 = e1.reset(123);
  auto o2 = e2.reset(123);
  for (int t = 0; t < c.episode_length; ++t) {
    const JointAction ja{pick(o1.blue_mask, a), pick(o1.red_mask, a)};
    const JointAction jb{pick(o2.blue_mask, b), pick(o2.red_mask, b)};
    o1 = e1.step(ja);
    o2 = e2.step(jb);
    CHECK(e1.state() == e2.state());
    CHECK(o1.blue_reward == o2.blue_reward);
  }
}
