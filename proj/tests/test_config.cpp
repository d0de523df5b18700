#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "l2b/config_io.hpp"
#include "l2b/errors.hpp"

using namespace l2b;
using nlohmann::json;

namespace {

GetEnv fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const char* name) -> const char* {
    const auto it = vars.find(name);
    return it == vars.end() ? nullptr : it->second.c_str();
  };
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c;
  const RunConfig back = parse_config(json(to_json(c)));
  EXPECT_EQ(json(to_json(back)), json(to_json(c)));
  EXPECT_EQ(c.eval.n_cases, 500u);
}

TEST(Config, ParsesSectionsWithExactFieldNames) {
  const json j = json::parse(R"({
    "seed": 17, "mode": "sarl", "workers": 2,
    "env": {"N": 12, "beta": 0.3, "robot_visible": true},
    "train": {"rl_episodes": 50, "gamma": 0.8, "discount_unit": "steps", "net_value": [32, 16]},
    "eval": {"n_cases": 20}
  })");
  const RunConfig c = parse_config(j);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_EQ(c.mode, env::Mode::sarl);
  EXPECT_EQ(c.workers, 2);
  EXPECT_EQ(c.env.N, 12);
  EXPECT_EQ(c.env.beta, 0.3);
  EXPECT_TRUE(c.env.robot_visible);
  EXPECT_EQ(c.train.rl_episodes, 50u);
  EXPECT_EQ(c.train.gamma, 0.8);
  EXPECT_EQ(c.train.discount_unit, rl::DiscountUnit::steps);
  EXPECT_EQ(c.train.net.value, (std::vector<int>{32, 16}));
  EXPECT_EQ(c.eval.n_cases, 20u);
  EXPECT_EQ(c.env.eta, 0.5);  // untouched default
}

TEST(Config, FieldLevelErrors) {
  EXPECT_NE(error_of([] { parse_config(json::parse(R"({"env": {"bogus": 1}})")); }).find("env.bogus"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_config(json::parse(R"({"env": {"N": "five"}})")); }).find("env.N"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_config(json::parse(R"({"train": {"rl_episodes": -3}})")); })
                .find("train.rl_episodes"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_config(json::parse(R"({"mode": "ppo"})")); }).find("mode"),
            std::string::npos);
}

TEST(Config, ValidationCitesEtaBetaConstraint) {
  RunConfig c;
  c.env.beta = 0.6;
  const std::string msg = error_of([&] { validate(c); });
  EXPECT_NE(msg.find("eta > beta"), std::string::npos) << msg;
}

TEST(Config, EnvironmentOverrides) {
  EXPECT_EQ(env_var_name("env", "beta"), "L2B_ENV_BETA");
  EXPECT_EQ(env_var_name("train", "rl_episodes"), "L2B_TRAIN_RL_EPISODES");
  EXPECT_EQ(env_var_name("", "seed"), "L2B_SEED");
  RunConfig c;
  apply_env_overrides(c, fake_env({{"L2B_ENV_BETA", "0.35"},
                                   {"L2B_ENV_N", "9"},
                                   {"L2B_MODE", "sarl"},
                                   {"L2B_ENV_ROBOT_VISIBLE", "true"},
                                   {"L2B_TRAIN_NET_VALUE", "[20, 10]"}}));
  EXPECT_EQ(c.env.beta, 0.35);
  EXPECT_EQ(c.env.N, 9);
  EXPECT_EQ(c.mode, env::Mode::sarl);
  EXPECT_TRUE(c.env.robot_visible);
  EXPECT_EQ(c.train.net.value, (std::vector<int>{20, 10}));
  const std::string msg = error_of([] {
    RunConfig d;
    apply_env_overrides(d, fake_env({{"L2B_ENV_N", "lots"}}));
  });
  EXPECT_NE(msg.find("L2B_ENV_N"), std::string::npos) << msg;
}

TEST(Config, EveryKeyHasAnEnvironmentVariable) {
  const auto keys = config_keys();
  EXPECT_GT(keys.size(), 30u);
  for (const auto& k : keys) {
    const auto dot = k.find('.');
    const std::string section = dot == std::string::npos ? "" : k.substr(0, dot);
    const std::string key = dot == std::string::npos ? k : k.substr(dot + 1);
    const std::string name = env_var_name(section, key);
    // Feeding back the current value must be accepted.
    RunConfig c;
    const json value = json(to_json(c)).contains(section) && !section.empty()
                           ? json(to_json(c))[section][key]
                           : json(to_json(c))[key];
    EXPECT_NO_THROW(apply_env_overrides(c, fake_env({{name, value.dump()}}))) << name;
  }
}

TEST(Config, LoadsFilesAndManifests) {
  const auto dir = std::filesystem::temp_directory_path() / "l2b_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "c.json") << R"({"env": {"N": 7}})";
    std::ofstream(dir / "m.json") << R"({"config": {"env": {"N": 8}}, "artifacts": {}})";
    std::ofstream(dir / "bad.json") << "{not json";
  }
  EXPECT_EQ(load_config(dir / "c.json").env.N, 7);
  EXPECT_EQ(load_config(dir / "m.json").env.N, 8);
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Config, ShippedConfigsAreValid) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(L2B_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(validate(load_config(entry.path()))) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 3);
}
