#include "l2b/config_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "l2b/errors.hpp"

namespace l2b {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const json&, const std::string&)> set;
  std::function<ordered_json(const RunConfig&)> get;
};

[[noreturn]] void fail(const std::string& where, const std::string& why) {
  throw ConfigError(where + ": " + why);
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "must be finite");
  return x;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::floor(x) == x && std::fabs(x) < 9e15) return static_cast<std::int64_t>(x);
  }
  fail(where, "expected an integer");
}

std::uint64_t as_u64(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t x = as_int(v, where);
  if (x < 0) fail(where, "must be >= 0");
  return static_cast<std::uint64_t>(x);
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected true or false");
  return v.get<bool>();
}

std::vector<int> as_widths(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of layer widths");
  std::vector<int> out;
  for (const auto& x : v) {
    const std::int64_t w = as_int(x, where);
    if (w <= 0 || w > 65536) fail(where, "layer widths must lie in [1, 65536]");
    out.push_back(static_cast<int>(w));
  }
  return out;
}

template <typename Member>
Field dbl(std::string section, std::string key, Member member) {
  return {section, key,
          [member](RunConfig& c, const json& v, const std::string& w) { member(c) = as_double(v, w); },
          [member](const RunConfig& c) { return ordered_json(member(const_cast<RunConfig&>(c))); }};
}

template <typename Member>
Field integer(std::string section, std::string key, Member member) {
  return {section, key,
          [member](RunConfig& c, const json& v, const std::string& w) {
            const std::int64_t x = as_int(v, w);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
              fail(w, "out of range");
            }
            member(c) = static_cast<int>(x);
          },
          [member](const RunConfig& c) { return ordered_json(member(const_cast<RunConfig&>(c))); }};
}

template <typename Member>
Field u64(std::string section, std::string key, Member member) {
  return {section, key,
          [member](RunConfig& c, const json& v, const std::string& w) { member(c) = as_u64(v, w); },
          [member](const RunConfig& c) { return ordered_json(member(const_cast<RunConfig&>(c))); }};
}

template <typename Member>
Field boolean(std::string section, std::string key, Member member) {
  return {section, key,
          [member](RunConfig& c, const json& v, const std::string& w) { member(c) = as_bool(v, w); },
          [member](const RunConfig& c) { return ordered_json(member(const_cast<RunConfig&>(c))); }};
}

template <typename Member>
Field widths(std::string section, std::string key, Member member) {
  return {section, key,
          [member](RunConfig& c, const json& v, const std::string& w) { member(c) = as_widths(v, w); },
          [member](const RunConfig& c) { return ordered_json(member(const_cast<RunConfig&>(c))); }};
}

#define L2B_M(path) [](RunConfig& c) -> auto& { return c.path; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(u64("", "seed", L2B_M(seed)));
    t.push_back({"", "mode",
                 [](RunConfig& c, const json& v, const std::string& w) {
                   if (!v.is_string()) fail(w, "expected \"sarl\" or \"l2b\"");
                   c.mode = env::parse_mode(v.get<std::string>());
                 },
                 [](const RunConfig& c) { return ordered_json(std::string(env::to_string(c.mode))); }});
    t.push_back(integer("", "workers", L2B_M(workers)));

    t.push_back(integer("env", "N", L2B_M(env.N)));
    t.push_back(dbl("env", "circle_radius", L2B_M(env.circle_radius)));
    t.push_back(dbl("env", "dt", L2B_M(env.dt)));
    t.push_back(dbl("env", "t_lim", L2B_M(env.t_lim)));
    t.push_back(dbl("env", "v_pref", L2B_M(env.v_pref)));
    t.push_back(dbl("env", "robot_radius", L2B_M(env.robot_radius)));
    t.push_back(dbl("env", "human_radius", L2B_M(env.human_radius)));
    t.push_back(dbl("env", "beep_range", L2B_M(env.beep_range)));
    t.push_back(dbl("env", "d_disc", L2B_M(env.d_disc)));
    t.push_back(dbl("env", "alpha", L2B_M(env.alpha)));
    t.push_back(dbl("env", "beta", L2B_M(env.beta)));
    t.push_back(dbl("env", "eta", L2B_M(env.eta)));
    t.push_back(dbl("env", "noise_half_width", L2B_M(env.noise_half_width)));
    t.push_back(boolean("env", "robot_visible", L2B_M(env.robot_visible)));
    t.push_back(dbl("env", "human_max_speed", L2B_M(env.human_max_speed)));
    t.push_back(dbl("env", "orca_time_horizon", L2B_M(env.orca_time_horizon)));

    t.push_back(dbl("train", "gamma", L2B_M(train.gamma)));
    t.push_back(u64("train", "imitation_episodes", L2B_M(train.imitation_episodes)));
    t.push_back(dbl("train", "imitation_lr", L2B_M(train.imitation_lr)));
    t.push_back(u64("train", "imitation_epochs", L2B_M(train.imitation_epochs)));
    t.push_back(dbl("train", "rl_lr", L2B_M(train.rl_lr)));
    t.push_back(u64("train", "batch_size", L2B_M(train.batch_size)));
    t.push_back(u64("train", "rl_episodes", L2B_M(train.rl_episodes)));
    t.push_back(dbl("train", "epsilon_start", L2B_M(train.epsilon_start)));
    t.push_back(dbl("train", "epsilon_end", L2B_M(train.epsilon_end)));
    t.push_back(u64("train", "epsilon_decay_episodes", L2B_M(train.epsilon_decay_episodes)));
    t.push_back(u64("train", "curriculum_switch_episode", L2B_M(train.curriculum_switch_episode)));
    t.push_back(integer("train", "curriculum_initial_N", L2B_M(train.curriculum_initial_N)));
    t.push_back(integer("train", "curriculum_target_N", L2B_M(train.curriculum_target_N)));
    t.push_back(u64("train", "target_sync_interval", L2B_M(train.target_sync_interval)));
    t.push_back(u64("train", "buffer_capacity", L2B_M(train.buffer_capacity)));
    t.push_back(u64("train", "train_batches", L2B_M(train.train_batches)));
    t.push_back(boolean("train", "replay_demonstrations", L2B_M(train.replay_demonstrations)));
    t.push_back(u64("train", "checkpoint_interval", L2B_M(train.checkpoint_interval)));
    t.push_back({"train", "discount_unit",
                 [](RunConfig& c, const json& v, const std::string& w) {
                   if (!v.is_string()) fail(w, "expected \"time\" or \"steps\"");
                   c.train.discount_unit = rl::parse_discount_unit(v.get<std::string>());
                 },
                 [](const RunConfig& c) {
                   return ordered_json(std::string(rl::to_string(c.train.discount_unit)));
                 }});
    t.push_back(widths("train", "net_embedding", L2B_M(train.net.embedding)));
    t.push_back(widths("train", "net_pairwise", L2B_M(train.net.pairwise)));
    t.push_back(widths("train", "net_attention", L2B_M(train.net.attention)));
    t.push_back(widths("train", "net_value", L2B_M(train.net.value)));

    t.push_back(u64("eval", "n_cases", L2B_M(eval.n_cases)));
    t.push_back(u64("eval", "base_seed", L2B_M(eval.base_seed)));
    return t;
  }();
  return table;
}

#undef L2B_M

std::string dotted(const Field& f) { return f.section.empty() ? f.key : f.section + "." + f.key; }

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

RunConfig parse_config(const json& input) {
  if (!input.is_object()) throw ConfigError("config: top level must be a JSON object");
  const json& j = input.contains("config") && input.contains("artifacts") ? input.at("config") : input;
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  RunConfig c;
  for (const auto& [name, value] : j.items()) {
    if (name == "env" || name == "train" || name == "eval") {
      if (!value.is_object()) fail(name, "expected an object");
      for (const auto& [key, v] : value.items()) {
        const Field* f = find_field(name, key);
        if (f == nullptr) fail(name + "." + key, "unknown key");
        f->set(c, v, name + "." + key);
      }
      continue;
    }
    const Field* f = find_field("", name);
    if (f == nullptr) fail(name, "unknown key");
    f->set(c, value, name);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  return parse_config(j);
}

ordered_json to_json(const RunConfig& config) {
  ordered_json out;
  for (const auto& f : fields()) {
    if (f.section.empty()) {
      out[f.key] = f.get(config);
    } else {
      out[f.section][f.key] = f.get(config);
    }
  }
  return out;
}

std::string env_var_name(const std::string& section, const std::string& key) {
  std::string name = "L2B_";
  if (!section.empty()) name += section + "_";
  name += key;
  for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return name;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(dotted(f));
  return out;
}

void set_config_value(RunConfig& config, const std::string& dotted_key, const json& value) {
  const auto dot = dotted_key.find('.');
  const std::string section = dot == std::string::npos ? "" : dotted_key.substr(0, dot);
  const std::string key = dot == std::string::npos ? dotted_key : dotted_key.substr(dot + 1);
  const Field* f = find_field(section, key);
  if (f == nullptr) fail(dotted_key, "unknown key");
  f->set(config, value, dotted_key);
}

void apply_env_overrides(RunConfig& config, const GetEnv& getenv) {
  for (const auto& f : fields()) {
    const std::string name = env_var_name(f.section, f.key);
    const char* raw = getenv(name.c_str());
    if (raw == nullptr) continue;
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = std::string(raw);
    try {
      f.set(config, value, dotted(f));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (from " + name + ")");
    }
  }
}

void validate(const RunConfig& config) {
  env::validate(config.env);
  rl::validate(config.train);
  if (config.workers < 1) throw ConfigError("workers: must be >= 1");
  if (config.eval.n_cases < 1) throw ConfigError("eval.n_cases: must be >= 1");
}

}  // namespace l2b
