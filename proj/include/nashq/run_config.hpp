#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "nashq/cyber_env.hpp"
#include "nashq/environment.hpp"
#include "nashq/train.hpp"

namespace nashq::cli {

enum class Mode { kTrain, kEval, kVerify };

enum class EnvKind { kCyber, kTabular };

struct EnvSection {
  EnvKind kind = EnvKind::kCyber;
  cyber::CyberConfig cyber;      // used when kind == kCyber
  std::string game;              // fixture path when kind == kTabular
  int episode_length = 100;

  bool operator==(const EnvSection&) const = default;
};

enum class EvalBlue { kNetwork, kSleep, kRestoreOnAlert };

struct EvalSection {
  int episodes = 64;
  std::uint64_t seed = 0;
  bool greedy = false;
  EvalBlue blue = EvalBlue::kNetwork;
  bool trace = false;  // also write trace.txt for the first episode

  bool operator==(const EvalSection&) const = default;
};

struct RunConfig {
  Mode mode = Mode::kTrain;
  train::TrainConfig train;
  EnvSection env;
  EvalSection eval;
  std::string output_dir = "runs/default";
  std::string checkpoint_in;    // empty = none
  std::string checkpoint_out;   // empty = <output_dir>/checkpoint.json
  int epochs = 200;
  int checkpoint_every = 50;

  /// Cross-section invariants (episode length agrees, ranges, paths).
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parse, unknown-key and range errors; the message carries "line N" when
/// the problem has a source location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a YAML run config. Absent keys keep their defaults; a relative
/// fixture path is resolved against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// YAML text that parse_config maps back to an equal RunConfig.
std::string write_config(const RunConfig& config);

std::string mode_name(Mode mode);

/// Environment instances for the configured scenario.
EnvFactory make_env_factory(const RunConfig& config);

}  // namespace nashq::cli
