#include "mbt/app/teleop.hpp"

#include <cmath>

#include "mbt/common/errors.hpp"
#include "mbt/eval/evaluate.hpp"

namespace mbt::app {
namespace {

constexpr int kEndlessHorizon = 1 << 30;

bool ReadNumber(const nlohmann::json& j, const char* key, double* out) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return false;
  *out = it->get<double>();
  return std::isfinite(*out);
}

nlohmann::json CommandJson(const env::Command& c) {
  return {{"vx", c.vx}, {"vy", c.vy}, {"omega", c.omega}, {"h", c.h}};
}

}  // namespace

std::optional<CommandMessage> ParseCommandMessage(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (j.contains("type") && j["type"] != "command") return std::nullopt;
  auto seq = j.find("seq");
  if (seq == j.end() || !seq->is_number_integer()) return std::nullopt;
  CommandMessage msg;
  msg.seq = seq->get<std::int64_t>();
  if (!ReadNumber(j, "vx", &msg.command.vx) || !ReadNumber(j, "vy", &msg.command.vy) ||
      !ReadNumber(j, "omega", &msg.command.omega) || !ReadNumber(j, "h", &msg.command.h)) {
    return std::nullopt;
  }
  return msg;
}

TeleopSession::TeleopSession(const ppo::PolicyBundle& bundle, eval::Scenario scenario,
                             TeleopOptions options)
    : bundle_(&bundle),
      scenario_(std::move(scenario)),
      options_(std::move(options)),
      env_(options_.env),
      runner_(bundle, scenario_.config.NumRobots()) {
  scenario_.config.Validate();
  command_ = eval::FindCommand("hold-still").command;
  StartEpisode();
}

void TeleopSession::StartEpisode() {
  env::EpisodeSpec spec = eval::MakeEvalEpisode(scenario_, command_, 0.0, options_.seed,
                                                episode_, options_.env);
  spec.horizon = kEndlessHorizon;
  obs_ = env_.Reset(spec);
  runner_.Reset(env_.NumRobots());
  restart_ = false;
}

void TeleopSession::Submit(std::string text) {
  std::lock_guard<std::mutex> lock(inbox_mutex_);
  inbox_.push_back(std::move(text));
}

long TeleopSession::malformed() const {
  std::lock_guard<std::mutex> lock(inbox_mutex_);
  return malformed_;
}

double TeleopSession::time() const {
  return static_cast<double>(frames_) * options_.env.sim.policy_dt;
}

nlohmann::json TeleopSession::Tick() {
  std::vector<std::string> inbox;
  {
    std::lock_guard<std::mutex> lock(inbox_mutex_);
    inbox.swap(inbox_);
  }
  std::optional<CommandMessage> newest;
  long bad = 0;
  for (const std::string& text : inbox) {
    std::optional<CommandMessage> msg = ParseCommandMessage(text);
    if (!msg) {
      ++bad;
      continue;
    }
    if (msg->seq <= last_seq_) continue;
    if (!newest || msg->seq > newest->seq) newest = msg;
  }
  if (bad) {
    std::lock_guard<std::mutex> lock(inbox_mutex_);
    malformed_ += bad;
  }

  if (restart_) {
    ++episode_;
    StartEpisode();
  }
  if (newest) {
    last_seq_ = newest->seq;
    env::Command c = env::ClampCommand(newest->command, options_.env.commands);
    c.duration = kEndlessHorizon;
    command_ = c;
    obs_ = env_.SetCommand(command_);
  }

  env::StepResult step;
  try {
    step = env_.Step(runner_.Act(obs_));
  } catch (const NumericalFault&) {
    step.termination = env::TerminationReason::kNone;
    step.done = true;
  } catch (const SolverError&) {
    step.done = true;
  }
  ++frames_;
  if (step.done) {
    restart_ = true;
  } else {
    obs_ = step.observations;
  }
  return Frame(step);
}

nlohmann::json TeleopSession::Frame(const env::StepResult& step) const {
  const sim::SimState& s = env_.state();
  nlohmann::json frame;
  frame["type"] = "frame";
  frame["schema"] = kWireSchema;
  frame["t"] = time();
  frame["episode"] = episode_;
  frame["episode_t"] = s.Time();

  const Vec3 cp = s.ControlPointPosition();
  const Vec3 rpy = RollPitchYaw(s.CarrierOrientation());
  nlohmann::json outline = nlohmann::json::array();
  for (const Vec2& p : s.config.carrier_extent) {
    const Vec3 w = s.CarrierPointWorld(Vec3(p.x(), p.y(), 0.0));
    outline.push_back({w.x(), w.y()});
  }
  frame["carrier"] = {{"x", cp.x()},       {"y", cp.y()},         {"z", cp.z()},
                      {"roll", rpy.x()},   {"pitch", rpy.y()},    {"yaw", rpy.z()},
                      {"outline", outline}};

  const auto& names = env::RewardBreakdown::TermNames();
  nlohmann::json robots = nlohmann::json::array();
  double team = 0.0;
  for (int r = 0; r < s.NumRobots(); ++r) {
    const Vec3 p = s.PelvisPosition(r);
    nlohmann::json feet = nlohmann::json::array();
    for (const sim::FootState& f : s.legs[r].feet) {
      feet.push_back({{"x", f.position.x()}, {"y", f.position.y()}, {"contact", f.in_stance}});
    }
    nlohmann::json robot{{"id", r},
                         {"x", p.x()},
                         {"y", p.y()},
                         {"z", p.z()},
                         {"yaw", Yaw(s.PelvisOrientation(r))},
                         {"feet", feet}};
    // What this robot's policy input says the command is.
    const env::Observation& o = obs_[r];
    robot["command"] = {{"vx", o[env::obs::kCommand]},
                        {"vy", o[env::obs::kCommand + 1]},
                        {"omega", o[env::obs::kCommand + 2]},
                        {"h", o[env::obs::kCommand + 3]}};
    if (r < static_cast<int>(step.rewards.size())) {
      const env::RewardBreakdown& rb = step.rewards[r];
      nlohmann::json terms;
      const auto local = rb.LocalTerms();
      const auto global = rb.GlobalTerms();
      for (int k = 0; k < env::kNumLocalTerms; ++k) terms[names[k]] = local[k];
      for (int k = 0; k < env::kNumGlobalTerms; ++k) {
        terms[names[env::kNumLocalTerms + k]] = global[k];
      }
      robot["reward"] = {{"total", rb.total}, {"terms", terms}};
      team += rb.total;
    }
    robots.push_back(std::move(robot));
  }
  frame["robots"] = std::move(robots);
  nlohmann::json cmd = CommandJson(command_);
  cmd["seq"] = last_seq_;
  frame["command"] = cmd;
  frame["reward"] = step.rewards.empty() ? 0.0 : team / static_cast<double>(step.rewards.size());
  frame["terminated"] = step.done;
  frame["termination"] = step.done && step.termination == env::TerminationReason::kNone
                             ? "fault"
                             : std::string(env::TerminationName(step.termination));
  frame["malformed"] = malformed();
  return frame;
}

}  // namespace mbt::app
