#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "l2b/env.hpp"
#include "l2b/policy.hpp"
#include "l2b/trajectory.hpp"

namespace l2b::eval {

enum class Outcome { success, collision, timeout };

std::string_view to_string(Outcome outcome);

struct EpisodeResult {
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::timeout;
  double nav_time = 0.0;
  int steps = 0;
  int beep_count = 0;
  Trajectory path;
};

/// One (method, N) row of the metric table. `time` is the mean navigation
/// time over successful episodes (NaN when there are none).
struct MetricRow {
  std::string method;
  int N = 0;
  double beta = 0.0;
  std::size_t n_cases = 0;
  double success = 0.0;
  double collision = 0.0;
  double timeout = 0.0;
  double time = 0.0;
  double beep_freq = 0.0;
};

struct Evaluation {
  MetricRow row;
  std::vector<EpisodeResult> episodes;
};

/// Runs one greedy episode on `env` (already reset) to termination.
EpisodeResult run_episode(const rl::RobotPolicy& policy, env::CrowdEnv& env);

/// Episodes on seeds base_seed .. base_seed + n_cases - 1, distributed over
/// `workers` threads and aggregated in seed order.
Evaluation evaluate(const rl::RobotPolicy& policy, const env::EnvConfig& config, std::size_t n_cases,
                    std::uint64_t base_seed, const std::string& method, int workers = 1);

MetricRow aggregate(std::span<const EpisodeResult> episodes, const std::string& method,
                    const env::EnvConfig& config);

/// Header: method,N,beta,success,collision,timeout,time,beep_freq
std::string metrics_csv(std::span<const MetricRow> rows);
std::string metrics_text(std::span<const MetricRow> rows);

/// Header: seed,outcome,nav_time,steps,beep_count
std::string episodes_csv(std::span<const EpisodeResult> episodes);

struct SweepCell {
  double beta = 0.0;
  int N = 0;
  double beep_freq = 0.0;
  double success = 0.0;
};

/// Maps (beta, N) to a policy for that cell.
using PolicyLookup = std::function<const rl::RobotPolicy*(double beta, int N)>;

/// Evaluates every (beta, N) cell. Throws ConfigError naming the first cell
/// whose policy is missing.
std::vector<SweepCell> beta_sweep(const PolicyLookup& lookup, std::span<const double> betas,
                                  std::span<const int> Ns, const env::EnvConfig& base,
                                  std::size_t n_cases, std::uint64_t base_seed, int workers = 1);

/// Rows per beta, columns per N, cells "beep_freq/success".
std::string sweep_table(std::span<const SweepCell> cells);
std::string sweep_csv(std::span<const SweepCell> cells);

}  // namespace l2b::eval
