#include "l2b/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "l2b/errors.hpp"

namespace l2b::eval {
namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

Outcome outcome_of(env::Terminal t) {
  switch (t) {
    case env::Terminal::goal: return Outcome::success;
    case env::Terminal::collision: return Outcome::collision;
    default: return Outcome::timeout;
  }
}

}  // namespace

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::success: return "success";
    case Outcome::collision: return "collision";
    case Outcome::timeout: return "timeout";
  }
  return "timeout";
}

EpisodeResult run_episode(const rl::RobotPolicy& policy, env::CrowdEnv& env) {
  EpisodeResult r;
  r.seed = env.episode_seed();
  r.path = begin_trajectory(env);
  while (!env.done()) {
    const rl::Command command = policy.act(env);
    const env::StepOutcome out = rl::apply(env, command);
    r.path.frames.push_back(capture_frame(env, command.action.beep, &out));
    r.beep_count += command.action.beep ? 1 : 0;
  }
  r.outcome = outcome_of(env.terminal());
  r.steps = env.steps();
  r.nav_time = env.time();
  return r;
}

Evaluation evaluate(const rl::RobotPolicy& policy, const env::EnvConfig& config, std::size_t n_cases,
                    std::uint64_t base_seed, const std::string& method, int workers) {
  if (n_cases == 0) throw UsageError("evaluate: n_cases must be >= 1");
  env::validate(config);
  Evaluation ev;
  ev.episodes.resize(n_cases);
  auto work = [&](std::size_t first, std::size_t stride) {
    env::CrowdEnv env(config);
    for (std::size_t i = first; i < n_cases; i += stride) {
      env.reset(base_seed + i);
      ev.episodes[i] = run_episode(policy, env);
    }
  };
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n_cases);
  if (w == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < w; ++k) threads.emplace_back(work, k, w);
    for (auto& t : threads) t.join();
  }
  ev.row = aggregate(ev.episodes, method, config);
  return ev;
}

MetricRow aggregate(std::span<const EpisodeResult> episodes, const std::string& method,
                    const env::EnvConfig& config) {
  MetricRow row;
  row.method = method;
  row.N = config.N;
  row.beta = config.beta;
  row.n_cases = episodes.size();
  std::size_t success = 0, collision = 0, timeout = 0;
  double time_sum = 0.0, beep_sum = 0.0;
  for (const auto& e : episodes) {
    switch (e.outcome) {
      case Outcome::success:
        ++success;
        time_sum += e.nav_time;
        break;
      case Outcome::collision: ++collision; break;
      case Outcome::timeout: ++timeout; break;
    }
    if (e.steps > 0) beep_sum += static_cast<double>(e.beep_count) / e.steps;
  }
  const double n = static_cast<double>(episodes.size());
  if (episodes.empty()) return row;
  row.success = success / n;
  row.collision = collision / n;
  row.timeout = timeout / n;
  row.time = success > 0 ? time_sum / success : std::numeric_limits<double>::quiet_NaN();
  row.beep_freq = beep_sum / n;
  return row;
}

std::string metrics_csv(std::span<const MetricRow> rows) {
  std::ostringstream os;
  os << "method,N,beta,success,collision,timeout,time,beep_freq\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.N << ',' << num(r.beta) << ',' << num(r.success) << ','
       << num(r.collision) << ',' << num(r.timeout) << ',' << num(r.time) << ','
       << num(r.beep_freq) << '\n';
  }
  return os.str();
}

std::string metrics_text(std::span<const MetricRow> rows) {
  const char* headers[] = {"method", "N", "beta", "success", "collision", "timeout", "time", "beep_freq"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    char time[32];
    std::snprintf(time, sizeof(time), "%.2f", r.time);
    auto f3 = [](double x) {
      char b[32];
      std::snprintf(b, sizeof(b), "%.3f", x);
      return std::string(b);
    };
    cells.push_back({r.method, std::to_string(r.N), f3(r.beta), f3(r.success), f3(r.collision),
                     f3(r.timeout), std::isnan(r.time) ? "-" : std::string(time), f3(r.beep_freq)});
  }
  std::vector<std::size_t> width(8);
  for (std::size_t c = 0; c < 8; ++c) {
    width[c] = std::string(headers[c]).size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (std::size_t c = 0; c < 8; ++c) os << (c ? "  " : "") << pad(headers[c], width[c]);
  os << '\n';
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 8; ++c) os << (c ? "  " : "") << pad(row[c], width[c]);
    os << '\n';
  }
  return os.str();
}

std::string episodes_csv(std::span<const EpisodeResult> episodes) {
  std::ostringstream os;
  os << "seed,outcome,nav_time,steps,beep_count\n";
  for (const auto& e : episodes) {
    os << e.seed << ',' << to_string(e.outcome) << ',' << num(e.nav_time) << ',' << e.steps << ','
       << e.beep_count << '\n';
  }
  return os.str();
}

std::vector<SweepCell> beta_sweep(const PolicyLookup& lookup, std::span<const double> betas,
                                  std::span<const int> Ns, const env::EnvConfig& base,
                                  std::size_t n_cases, std::uint64_t base_seed, int workers) {
  std::vector<std::pair<const rl::RobotPolicy*, env::EnvConfig>> plan;
  for (const double beta : betas) {
    for (const int N : Ns) {
      const rl::RobotPolicy* policy = lookup ? lookup(beta, N) : nullptr;
      if (policy == nullptr) {
        throw ConfigError("beta_sweep: missing checkpoint for cell beta=" + num(beta) +
                          ", N=" + std::to_string(N));
      }
      env::EnvConfig c = base;
      c.beta = beta;
      c.N = N;
      plan.emplace_back(policy, c);
    }
  }
  std::vector<SweepCell> out;
  for (const auto& [policy, c] : plan) {
    const Evaluation ev = evaluate(*policy, c, n_cases, base_seed, policy->name(), workers);
    out.push_back({c.beta, c.N, ev.row.beep_freq, ev.row.success});
  }
  return out;
}

std::string sweep_table(std::span<const SweepCell> cells) {
  std::vector<double> betas;
  std::vector<int> Ns;
  for (const auto& c : cells) {
    if (std::find(betas.begin(), betas.end(), c.beta) == betas.end()) betas.push_back(c.beta);
    if (std::find(Ns.begin(), Ns.end(), c.N) == Ns.end()) Ns.push_back(c.N);
  }
  constexpr std::size_t kWidth = 13;
  std::ostringstream os;
  os << pad("beta \\ N", 8);
  for (const int N : Ns) os << "  " << pad(std::to_string(N), kWidth);
  os << '\n';
  for (const double beta : betas) {
    char b[16];
    std::snprintf(b, sizeof(b), "%.2f", beta);
    os << pad(b, 8);
    for (const int N : Ns) {
      std::string cell = "-";
      for (const auto& c : cells) {
        if (c.beta == beta && c.N == N) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.3f/%.3f", c.beep_freq, c.success);
          cell = buf;
        }
      }
      os << "  " << pad(cell, kWidth);
    }
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(std::span<const SweepCell> cells) {
  std::ostringstream os;
  os << "beta,N,beep_freq,success\n";
  for (const auto& c : cells) {
    os << num(c.beta) << ',' << c.N << ',' << num(c.beep_freq) << ',' << num(c.success) << '\n';
  }
  return os.str();
}

}  // namespace l2b::eval
