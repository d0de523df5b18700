#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "l2b/errors.hpp"
#include "l2b/run.hpp"

using namespace l2b;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_run(env::Mode mode) {
  RunConfig c;
  c.seed = 3;
  c.mode = mode;
  c.env.N = 3;
  c.train.imitation_episodes = 3;
  c.train.imitation_epochs = 2;
  c.train.rl_episodes = 4;
  c.train.batch_size = 16;
  c.train.train_batches = 1;
  c.train.checkpoint_interval = 2;
  c.train.net.embedding = {8, 6};
  c.train.net.pairwise = {6, 4};
  c.train.net.attention = {6};
  c.train.net.value = {8};
  c.eval.n_cases = 4;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(RunTrain, WritesManifestLogAndCheckpoints) {
  for (const auto mode : {env::Mode::sarl, env::Mode::l2b}) {
    TempDir dir("l2b_run_train");
    std::ostringstream progress;
    run::cmd_train(tiny_run(mode), dir.path, progress);
    const run::RunPaths paths{dir.path};
    const auto manifest = nlohmann::json::parse(slurp(paths.manifest()));
    EXPECT_EQ(manifest["action_space_size"], mode == env::Mode::sarl ? 9 : 17);
    EXPECT_EQ(manifest["seed"], 3);
    EXPECT_EQ(parse_config(manifest).env.N, 3);
    EXPECT_TRUE(fs::exists(paths.model()));
    EXPECT_TRUE(fs::exists(paths.latest()));
    EXPECT_TRUE(fs::exists(paths.checkpoints() / "imitation.ckpt"));
    EXPECT_TRUE(fs::exists(paths.checkpoints() / "episode_000002.ckpt"));
    std::istringstream log(slurp(paths.log()));
    std::string line;
    int n = 0;
    while (std::getline(log, line)) {
      EXPECT_EQ(nlohmann::json::parse(line)["episode"], n);
      ++n;
    }
    EXPECT_EQ(n, 4);
  }
}

TEST(RunTrain, ResumesFromLatestCheckpoint) {
  TempDir full("l2b_run_full"), part("l2b_run_part");
  std::ostringstream progress;
  RunConfig c = tiny_run(env::Mode::l2b);
  run::cmd_train(c, full.path, progress);
  run::cmd_train(c, part.path, progress);
  // Roll the second run back to its episode-2 checkpoint, then rerun.
  fs::copy_file(part.path / "checkpoints" / "episode_000002.ckpt", part.path / "checkpoints" / "latest.ckpt",
                fs::copy_options::overwrite_existing);
  run::cmd_train(c, part.path, progress);
  EXPECT_NE(progress.str().find("resuming from episode 2"), std::string::npos);
  std::istringstream log(slurp(part.path / "train_log.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(log, line)) EXPECT_EQ(nlohmann::json::parse(line)["episode"], n++);
  EXPECT_EQ(n, 4);

  RunConfig other = c;
  other.env.N = 4;
  EXPECT_THROW(run::cmd_train(other, part.path, progress), ConfigError);
}

TEST(RunTrain, IdenticalManifestsGiveIdenticalArtifacts) {
  TempDir a("l2b_run_a"), b("l2b_run_b");
  std::ostringstream progress;
  run::cmd_train(tiny_run(env::Mode::l2b), a.path, progress);
  run::cmd_train(tiny_run(env::Mode::l2b), b.path, progress);
  EXPECT_EQ(slurp(a.path / "train_log.jsonl"), slurp(b.path / "train_log.jsonl"));
  EXPECT_EQ(slurp(a.path / "model.ckpt"), slurp(b.path / "model.ckpt"));
}

TEST(RunEvaluate, WritesReportsAndRejectsBadCheckpoints) {
  TempDir run_dir("l2b_run_eval_train"), out("l2b_run_eval_out");
  std::ostringstream progress;
  RunConfig c = tiny_run(env::Mode::l2b);
  run::cmd_train(c, run_dir.path, progress);
  const fs::path model = run_dir.path / "model.ckpt";

  c.eval.n_cases = 1;
  const auto ev = run::cmd_evaluate("value", model, c, out.path, progress);
  EXPECT_EQ(ev.episodes.size(), 1u);
  const std::string episodes = slurp(out.path / "episodes.csv");
  EXPECT_EQ(std::count(episodes.begin(), episodes.end(), '\n'), 2);
  EXPECT_EQ(slurp(out.path / "metrics.csv").rfind("method,N,beta,success,collision,timeout,time,beep_freq\n", 0), 0u);

  // Corrupted checkpoint: error, and nothing written.
  std::string bytes = slurp(model);
  bytes[bytes.size() / 2] ^= 1;
  const fs::path broken = run_dir.path / "broken.ckpt";
  std::ofstream(broken, std::ios::binary) << bytes;
  const fs::path untouched = out.path / "second";
  EXPECT_THROW(run::cmd_evaluate("value", broken, c, untouched, progress), CheckpointError);
  EXPECT_FALSE(fs::exists(untouched));

  // Architecture mismatch names the differing shape.
  RunConfig wide = c;
  wide.train.net.value = {12};
  try {
    run::cmd_evaluate("value", model, wide, untouched, progress);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("value.0.weight"), std::string::npos) << e.what();
  }
  EXPECT_THROW(run::cmd_evaluate("value", std::nullopt, c, untouched, progress), UsageError);
}

TEST(RunRollout, TraceBytesAreReproducible) {
  TempDir dir("l2b_run_rollout");
  const RunConfig c = tiny_run(env::Mode::l2b);
  run::cmd_rollout("orca", std::nullopt, c, 42, dir.path / "a.jsonl", dir.path / "a.svg");
  run::cmd_rollout("orca", std::nullopt, c, 42, dir.path / "b.jsonl", std::nullopt);
  EXPECT_EQ(slurp(dir.path / "a.jsonl"), slurp(dir.path / "b.jsonl"));
  EXPECT_TRUE(fs::exists(dir.path / "a.svg"));
  EXPECT_FALSE(fs::exists(dir.path / "b.svg"));
  std::istringstream in(slurp(dir.path / "a.jsonl"));
  const Trajectory t = read_jsonl(in);
  EXPECT_GT(t.frames.size(), 1u);
  EXPECT_EQ(t.episode_id, 42u);

  run::cmd_plot(dir.path / "a.jsonl", dir.path / "c.svg");
  EXPECT_EQ(slurp(dir.path / "a.svg"), slurp(dir.path / "c.svg"));
}

TEST(RunSweep, FindsCellsByDirectoryName) {
  TempDir runs("l2b_run_sweep"), out("l2b_run_sweep_out");
  std::ostringstream progress;
  RunConfig c = tiny_run(env::Mode::l2b);
  c.env.beta = 0.1;
  run::cmd_train(c, runs.path / run::sweep_cell_name(0.1, 3), progress);
  EXPECT_EQ(run::sweep_cell_name(0.1, 3), "beta_0.1_N_3");
  const auto cells = run::cmd_sweep(runs.path, {0.1}, {3}, c, out.path, progress);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(fs::exists(out.path / "sweep.csv"));
  EXPECT_THROW(run::cmd_sweep(runs.path, {0.1, 0.2}, {3}, c, out.path, progress), ConfigError);
}
