#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "l2b/config_io.hpp"
#include "l2b/eval.hpp"
#include "l2b/policy.hpp"

/// Command drivers behind the `l2b` executable. Each writes its artifacts
/// and throws on failure; the executable maps exceptions to exit codes.
namespace l2b::run {

/// Run directory layout written by cmd_train.
struct RunPaths {
  std::filesystem::path root;
  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path log() const { return root / "train_log.jsonl"; }
  std::filesystem::path checkpoints() const { return root / "checkpoints"; }
  std::filesystem::path latest() const { return checkpoints() / "latest.ckpt"; }
  std::filesystem::path model() const { return root / "model.ckpt"; }
};

/// Trains into `out_dir`, writing manifest.json, train_log.jsonl,
/// checkpoints/ and model.ckpt. If out_dir already holds a run with the
/// same configuration and a latest checkpoint, training resumes from it.
void cmd_train(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& progress);

/// Policy named by `policy` ("value", "orca", "goal", "random"); "value"
/// loads `checkpoint` with the architecture from `config`.
std::unique_ptr<rl::RobotPolicy> make_policy(const std::string& policy,
                                             const std::optional<std::filesystem::path>& checkpoint,
                                             const RunConfig& config);

/// Writes metrics.csv, metrics.txt and episodes.csv into `out_dir`. The
/// checkpoint is loaded before anything is written.
eval::Evaluation cmd_evaluate(const std::string& policy,
                              const std::optional<std::filesystem::path>& checkpoint,
                              const RunConfig& config, const std::filesystem::path& out_dir,
                              std::ostream& progress);

/// One greedy episode on `seed`; writes the JSONL trace and optionally an SVG.
eval::EpisodeResult cmd_rollout(const std::string& policy,
                                const std::optional<std::filesystem::path>& checkpoint,
                                const RunConfig& config, std::uint64_t seed,
                                const std::filesystem::path& trace_out,
                                const std::optional<std::filesystem::path>& plot_out);

/// Evaluates <runs_dir>/beta_<beta>_N_<N>/model.ckpt for every cell and
/// writes sweep.csv and sweep.txt into `out_dir`.
std::vector<eval::SweepCell> cmd_sweep(const std::filesystem::path& runs_dir,
                                       const std::vector<double>& betas, const std::vector<int>& Ns,
                                       const RunConfig& config, const std::filesystem::path& out_dir,
                                       std::ostream& progress);

/// Directory name of one sweep cell, e.g. beta_0.1_N_20.
std::string sweep_cell_name(double beta, int N);

/// Renders a JSONL trace to SVG.
void cmd_plot(const std::filesystem::path& trace_in, const std::filesystem::path& svg_out);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace l2b::run
