#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "l2b/env.hpp"
#include "l2b/trainer.hpp"

namespace l2b {

struct EvalConfig {
  std::uint64_t n_cases = 500;
  std::uint64_t base_seed = 1000;
};

/// Everything a run needs. JSON layout:
///   {"seed": 7, "mode": "l2b", "workers": 1,
///    "env": {...EnvConfig fields...}, "train": {...}, "eval": {...}}
/// Keys match the C++ field names; missing keys keep their defaults.
struct RunConfig {
  std::uint64_t seed = 0;
  env::Mode mode = env::Mode::l2b;
  int workers = 1;
  env::EnvConfig env;
  rl::TrainConfig train;
  EvalConfig eval;
};

/// Throws ConfigError("<section>.<key>: ...") on unknown keys or bad types.
/// A run manifest is accepted too; its "config" member is used.
RunConfig parse_config(const nlohmann::json& json);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const RunConfig& config);

/// Variable name for a key: L2B_<SECTION>_<KEY> upper-cased, or L2B_<KEY>
/// for top-level keys. Example: env.beta -> L2B_ENV_BETA.
std::string env_var_name(const std::string& section, const std::string& key);

/// Every overridable key as "section.key" (top-level keys have no dot).
std::vector<std::string> config_keys();

using GetEnv = std::function<const char*(const char*)>;

/// Applies L2B_* variables. Values are parsed as JSON, falling back to a
/// plain string (so L2B_MODE=sarl works).
void apply_env_overrides(RunConfig& config, const GetEnv& getenv);

/// Sets one "section.key" from a JSON value with the same checks as files.
void set_config_value(RunConfig& config, const std::string& dotted_key, const nlohmann::json& value);

/// Throws ConfigError on invalid values (env and train validation).
void validate(const RunConfig& config);

}  // namespace l2b
