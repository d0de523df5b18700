#include "l2b/run.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "l2b/checkpoint.hpp"
#include "l2b/errors.hpp"
#include "l2b/render.hpp"
#include "l2b/trainer.hpp"
#include "l2b/trajectory.hpp"

namespace l2b::run {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string checkpoint_name(std::uint64_t episode) {
  if (episode == 0) return "imitation.ckpt";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "episode_%06llu.ckpt", static_cast<unsigned long long>(episode));
  return buf;
}

}  // namespace

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void cmd_train(const RunConfig& config, const fs::path& out_dir, std::ostream& progress) {
  RunConfig c = config;
  c.train.workers = c.workers;
  validate(c);
  const RunPaths paths{out_dir};
  const ordered_json config_json = to_json(c);

  std::optional<nn::Checkpoint> resume;
  if (fs::exists(paths.manifest()) && fs::exists(paths.latest())) {
    const json old = json::parse(read_file(paths.manifest()), nullptr, false);
    if (old.is_discarded() || !old.contains("config") || old.at("config") != json(config_json)) {
      throw ConfigError("out: " + out_dir.string() +
                        " holds a run with a different configuration; choose another --out");
    }
    resume = nn::load_checkpoint(paths.latest(), c.train.net);
    progress << "resuming from episode " << resume->meta.episode << "\n";
  }
  fs::create_directories(paths.checkpoints());

  ordered_json manifest;
  manifest["command"] = "train";
  manifest["seed"] = c.seed;
  manifest["mode"] = std::string(env::to_string(c.mode));
  manifest["action_space_size"] = env::action_space(c.mode).size();
  manifest["started_at"] = utc_now();
  if (resume) manifest["resumed_from_episode"] = resume->meta.episode;
  manifest["config"] = config_json;
  manifest["artifacts"] = {{"manifest", "manifest.json"},
                           {"log", "train_log.jsonl"},
                           {"checkpoints", "checkpoints"},
                           {"latest", "checkpoints/latest.ckpt"},
                           {"model", "model.ckpt"}};
  write_file(paths.manifest(), manifest.dump(2) + "\n");

  // Keep log records up to the resume point so the log stays one line per episode.
  std::string kept;
  if (resume && fs::exists(paths.log())) {
    std::istringstream lines(read_file(paths.log()));
    std::string line;
    while (std::getline(lines, line)) {
      const json rec = json::parse(line, nullptr, false);
      if (!rec.is_discarded() && rec.value("episode", std::uint64_t{0}) < resume->meta.episode) {
        kept += line + "\n";
      }
    }
  }
  write_file(paths.log(), kept);
  std::ofstream log(paths.log(), std::ios::app);

  rl::TrainHooks hooks;
  hooks.on_episode = [&](const rl::EpisodeLog& rec) {
    log << rl::to_json(rec) << '\n';
    log.flush();
    if ((rec.episode + 1) % 100 == 0) {
      progress << "episode " << rec.episode + 1 << " outcome " << env::to_string(rec.outcome)
               << " epsilon " << rec.epsilon << "\n";
    }
  };
  hooks.on_checkpoint = [&](const nn::Checkpoint& ck) {
    nn::save_checkpoint(paths.checkpoints() / checkpoint_name(ck.meta.episode), ck);
    nn::save_checkpoint(paths.latest(), ck);
  };
  if (!resume) progress << "imitation bootstrap: " << c.train.imitation_episodes << " episodes\n";
  const rl::TrainResult result = rl::train(c.env, c.train, c.mode, c.seed, hooks, resume);
  nn::save_checkpoint(paths.model(), {result.params, {c.train.rl_episodes, result.updates}});
  progress << "wrote " << paths.model().string() << "\n";
}

std::unique_ptr<rl::RobotPolicy> make_policy(const std::string& policy,
                                             const std::optional<fs::path>& checkpoint,
                                             const RunConfig& config) {
  if (policy == "value") {
    if (!checkpoint) throw UsageError("a checkpoint is required for the value policy");
    auto params = std::make_shared<const nn::NetParams>(
        nn::load_checkpoint(*checkpoint, config.train.net).params);
    return std::make_unique<rl::ValuePolicy>(params, config.mode, config.train.gamma,
                                             config.train.discount_unit);
  }
  if (policy == "orca") return std::make_unique<rl::OrcaPolicy>();
  if (policy == "goal") return std::make_unique<rl::GoalSeekingPolicy>();
  if (policy == "random") return std::make_unique<rl::RandomPolicy>(config.mode);
  throw UsageError("unknown policy '" + policy + "' (expected value, orca, goal or random)");
}

eval::Evaluation cmd_evaluate(const std::string& policy, const std::optional<fs::path>& checkpoint,
                              const RunConfig& config, const fs::path& out_dir,
                              std::ostream& progress) {
  validate(config);
  const auto p = make_policy(policy, checkpoint, config);
  eval::Evaluation ev = eval::evaluate(*p, config.env, config.eval.n_cases, config.eval.base_seed,
                                       p->name(), config.workers);
  const eval::MetricRow rows[] = {ev.row};
  write_file(out_dir / "metrics.csv", eval::metrics_csv(rows));
  write_file(out_dir / "metrics.txt", eval::metrics_text(rows));
  write_file(out_dir / "episodes.csv", eval::episodes_csv(ev.episodes));
  progress << eval::metrics_text(rows);
  return ev;
}

eval::EpisodeResult cmd_rollout(const std::string& policy, const std::optional<fs::path>& checkpoint,
                                const RunConfig& config, std::uint64_t seed,
                                const fs::path& trace_out, const std::optional<fs::path>& plot_out) {
  validate(config);
  const auto p = make_policy(policy, checkpoint, config);
  env::CrowdEnv env(config.env);
  env.reset(seed);
  eval::EpisodeResult r = eval::run_episode(*p, env);
  write_file(trace_out, to_jsonl(r.path));
  if (plot_out) write_file(*plot_out, render_svg(r.path));
  return r;
}

std::string sweep_cell_name(double beta, int N) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "beta_%g_N_%d", beta, N);
  return buf;
}

std::vector<eval::SweepCell> cmd_sweep(const fs::path& runs_dir, const std::vector<double>& betas,
                                       const std::vector<int>& Ns, const RunConfig& config,
                                       const fs::path& out_dir, std::ostream& progress) {
  validate(config);
  std::map<std::pair<double, int>, std::unique_ptr<rl::RobotPolicy>> policies;
  for (const double beta : betas) {
    for (const int N : Ns) {
      const fs::path ckpt = runs_dir / sweep_cell_name(beta, N) / "model.ckpt";
      if (fs::exists(ckpt)) policies[{beta, N}] = make_policy("value", ckpt, config);
    }
  }
  const auto lookup = [&](double beta, int N) -> const rl::RobotPolicy* {
    const auto it = policies.find({beta, N});
    return it == policies.end() ? nullptr : it->second.get();
  };
  const auto cells = eval::beta_sweep(lookup, betas, Ns, config.env, config.eval.n_cases,
                                      config.eval.base_seed, config.workers);
  write_file(out_dir / "sweep.csv", eval::sweep_csv(cells));
  write_file(out_dir / "sweep.txt", eval::sweep_table(cells));
  progress << eval::sweep_table(cells);
  return cells;
}

void cmd_plot(const fs::path& trace_in, const fs::path& svg_out) {
  std::ifstream in(trace_in);
  if (!in) throw std::runtime_error("cannot read trace " + trace_in.string());
  write_file(svg_out, render_svg(read_jsonl(in)));
}

}  // namespace l2b::run
