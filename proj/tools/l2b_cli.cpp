#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "l2b/checkpoint.hpp"
#include "l2b/config_io.hpp"
#include "l2b/errors.hpp"
#include "l2b/run.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> workers;
  std::optional<std::uint64_t> episodes;
  std::optional<std::uint64_t> n_cases;
  std::optional<double> beta;
  std::optional<int> n_humans;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "root seed (rollout: episode seed)");
  app->add_option("--mode", f.mode, "sarl (9 actions) or l2b (17 actions)");
  app->add_option("--workers", f.workers, "parallel rollout workers");
  app->add_option("--episodes", f.episodes, "RL training episodes");
  app->add_option("--n-cases", f.n_cases, "evaluation episodes (default 500)");
  app->add_option("--beta", f.beta, "beep penalty weight");
  app->add_option("--n-humans", f.n_humans, "number of pedestrians");
}

// defaults < file < L2B_* environment < flags
l2b::RunConfig resolve(const CommonFlags& f) {
  l2b::RunConfig c = f.config.empty() ? l2b::RunConfig{} : l2b::load_config(f.config);
  l2b::apply_env_overrides(c, [](const char* name) { return std::getenv(name); });
  if (f.seed) c.seed = *f.seed;
  if (f.mode) c.mode = l2b::env::parse_mode(*f.mode);
  if (f.workers) c.workers = *f.workers;
  if (f.episodes) c.train.rl_episodes = *f.episodes;
  if (f.n_cases) c.eval.n_cases = *f.n_cases;
  if (f.beta) c.env.beta = *f.beta;
  if (f.n_humans) c.env.N = *f.n_humans;
  l2b::validate(c);
  return c;
}

std::optional<std::filesystem::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd navigation with active path clearing: train, evaluate, roll out, plot."};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, rollout_flags, sweep_flags;
  std::string train_out;
  auto* train = app.add_subcommand("train", "imitation bootstrap + RL training into a run directory");
  add_common(train, train_flags);
  train->add_option("--out", train_out, "run directory")->required();

  std::string eval_out, eval_ckpt, eval_policy = "value";
  auto* evaluate = app.add_subcommand("evaluate", "seeded evaluation, writes metrics.csv");
  add_common(evaluate, eval_flags);
  evaluate->add_option("--checkpoint", eval_ckpt, "value-network checkpoint");
  evaluate->add_option("--policy", eval_policy, "value, orca, goal or random");
  evaluate->add_option("--out", eval_out, "output directory")->required();

  std::string rollout_ckpt, rollout_policy = "value", trace_out, plot_out;
  auto* rollout = app.add_subcommand("rollout", "one greedy episode to a JSONL trace (and SVG)");
  add_common(rollout, rollout_flags);
  rollout->add_option("--checkpoint", rollout_ckpt, "value-network checkpoint");
  rollout->add_option("--policy", rollout_policy, "value, orca, goal or random");
  rollout->add_option("--trace,--out", trace_out, "trace output (.jsonl)")->required();
  rollout->add_option("--plot", plot_out, "SVG output");

  std::string runs_dir, sweep_out;
  std::vector<double> betas{0.1, 0.2, 0.3, 0.4};
  std::vector<int> ns{5, 10, 15, 20};
  auto* sweep = app.add_subcommand("sweep", "beep frequency / success grid over trained cells");
  add_common(sweep, sweep_flags);
  sweep->add_option("--runs", runs_dir, "directory holding beta_<b>_N_<n>/model.ckpt")->required();
  sweep->add_option("--betas", betas, "beta values")->delimiter(',');
  sweep->add_option("--ns", ns, "pedestrian counts")->delimiter(',');
  sweep->add_option("--out", sweep_out, "output directory")->required();

  std::string plot_trace, plot_svg;
  auto* plot = app.add_subcommand("plot", "render a JSONL trace to SVG");
  plot->add_option("--trace", plot_trace, "trace input (.jsonl)")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_svg, "SVG output")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      l2b::run::cmd_train(resolve(train_flags), train_out, std::cout);
    } else if (*evaluate) {
      l2b::run::cmd_evaluate(eval_policy, opt_path(eval_ckpt), resolve(eval_flags), eval_out, std::cout);
    } else if (*rollout) {
      const l2b::RunConfig c = resolve(rollout_flags);
      const std::uint64_t seed = rollout_flags.seed ? *rollout_flags.seed : c.eval.base_seed;
      const auto r = l2b::run::cmd_rollout(rollout_policy, opt_path(rollout_ckpt), c, seed, trace_out,
                                           opt_path(plot_out));
      std::cout << "outcome " << l2b::eval::to_string(r.outcome) << " steps " << r.steps
                << " beeps " << r.beep_count << "\n";
    } else if (*sweep) {
      l2b::run::cmd_sweep(runs_dir, betas, ns, resolve(sweep_flags), sweep_out, std::cout);
    } else if (*plot) {
      l2b::run::cmd_plot(plot_trace, plot_svg);
    }
  } catch (const l2b::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const l2b::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const l2b::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
