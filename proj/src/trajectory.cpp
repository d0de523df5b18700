#include "l2b/trajectory.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace l2b {

using nlohmann::json;

int Trajectory::beep_count() const {
  return static_cast<int>(std::count_if(frames.begin(), frames.end(),
                                        [](const Frame& f) { return f.beep; }));
}

Frame capture_frame(const env::CrowdEnv& env, bool beep, const env::StepOutcome* outcome) {
  Frame f;
  f.step = env.steps();
  f.t = env.time();
  f.robot_position = env.robot().position;
  f.robot_velocity = env.robot().velocity;
  f.beep = beep;
  for (const auto& p : env.pedestrians()) {
    f.pedestrians.push_back({p.id, p.position, p.velocity});
  }
  if (outcome != nullptr) {
    f.reward = outcome->reward;
    f.reward_env = outcome->reward_env;
    f.reward_social = outcome->reward_social;
    f.terminal = outcome->terminal;
  }
  return f;
}

Trajectory begin_trajectory(const env::CrowdEnv& env) {
  Trajectory tr;
  tr.episode_id = env.episode_seed();
  tr.robot_goal = env.robot().goal;
  tr.robot_radius = env.robot().radius;
  tr.human_radius = env.config().human_radius;
  tr.beep_range = env.robot().beep_range;
  tr.frames.push_back(capture_frame(env, false, nullptr));
  return tr;
}

void write_jsonl(std::ostream& os, const Trajectory& tr) {
  for (const Frame& f : tr.frames) {
    json peds = json::array();
    for (const auto& p : f.pedestrians) {
      peds.push_back({{"id", p.id},
                      {"px", p.position.x},
                      {"py", p.position.y},
                      {"vx", p.velocity.x},
                      {"vy", p.velocity.y}});
    }
    json rec = {{"episode", tr.episode_id},
                {"step", f.step},
                {"t", f.t},
                {"robot",
                 {{"px", f.robot_position.x},
                  {"py", f.robot_position.y},
                  {"vx", f.robot_velocity.x},
                  {"vy", f.robot_velocity.y},
                  {"gx", tr.robot_goal.x},
                  {"gy", tr.robot_goal.y},
                  {"radius", tr.robot_radius}}},
                {"beep", f.beep},
                {"beep_range", tr.beep_range},
                {"human_radius", tr.human_radius},
                {"pedestrians", std::move(peds)},
                {"reward", f.reward},
                {"reward_env", f.reward_env},
                {"reward_social", f.reward_social},
                {"terminal", std::string(env::to_string(f.terminal))}};
    os << rec.dump() << '\n';
  }
}

std::string to_jsonl(const Trajectory& trajectory) {
  std::ostringstream os;
  write_jsonl(os, trajectory);
  return os.str();
}

Trajectory read_jsonl(std::istream& is) {
  Trajectory tr;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      const json& robot = rec.at("robot");
      if (tr.frames.empty()) {
        tr.episode_id = rec.at("episode").get<std::uint64_t>();
        tr.robot_goal = {robot.at("gx").get<double>(), robot.at("gy").get<double>()};
        tr.robot_radius = robot.at("radius").get<double>();
        tr.human_radius = rec.at("human_radius").get<double>();
        tr.beep_range = rec.at("beep_range").get<double>();
      }
      Frame f;
      f.step = rec.at("step").get<int>();
      f.t = rec.at("t").get<double>();
      f.robot_position = {robot.at("px").get<double>(), robot.at("py").get<double>()};
      f.robot_velocity = {robot.at("vx").get<double>(), robot.at("vy").get<double>()};
      f.beep = rec.at("beep").get<bool>();
      for (const auto& p : rec.at("pedestrians")) {
        f.pedestrians.push_back({p.at("id").get<int>(),
                                 {p.at("px").get<double>(), p.at("py").get<double>()},
                                 {p.at("vx").get<double>(), p.at("vy").get<double>()}});
      }
      f.reward = rec.at("reward").get<double>();
      f.reward_env = rec.at("reward_env").get<double>();
      f.reward_social = rec.at("reward_social").get<double>();
      f.terminal = env::parse_terminal(rec.at("terminal").get<std::string>());
      tr.frames.push_back(std::move(f));
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return tr;
}

}  // namespace l2b
