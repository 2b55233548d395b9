#include "mbt/app/config.hpp"

#include <cstdlib>
#include <fstream>

#include "mbt/common/errors.hpp"

using nlohmann::json;

namespace nlohmann {

template <>
struct adl_serializer<mbt::Vec3> {
  static void to_json(json& j, const mbt::Vec3& v) { j = {v.x(), v.y(), v.z()}; }
  static void from_json(const json& j, mbt::Vec3& v) {
    if (!j.is_array() || j.size() != 3) throw mbt::ConfigError("expected [x, y, z]");
    v = mbt::Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  }
};

template <>
struct adl_serializer<mbt::Vec2> {
  static void to_json(json& j, const mbt::Vec2& v) { j = {v.x(), v.y()}; }
  static void from_json(const json& j, mbt::Vec2& v) {
    if (!j.is_array() || j.size() != 2) throw mbt::ConfigError("expected [x, y]");
    v = mbt::Vec2(j[0].get<double>(), j[1].get<double>());
  }
};

}  // namespace nlohmann

namespace mbt::sim {

void to_json(json& j, const Range& r) { j = {r.lo, r.hi}; }
void from_json(const json& j, Range& r) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [lo, hi] range");
  r.lo = j[0].get<double>();
  r.hi = j[1].get<double>();
  if (!(r.lo <= r.hi)) throw ConfigError("range has lo > hi");
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LegParams, hip_half_width, max_leg_length,
                                   gait_frequency, duty, min_airtime, swing_height,
                                   max_normal_force, force_scale, placement_scale,
                                   height_stiffness, height_damping, height_slew_rate,
                                   posture_stiffness, posture_damping, yaw_friction,
                                   stance_drag, friction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimParams, policy_dt, substeps, pelvis_mass,
                                   pelvis_inertia, mount_mass, carrier_min_inertia,
                                   joint_damping, com_reference_length, legs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RandomizationRanges, damping, mass, com_offset,
                                   friction, encoder_noise, ground_slope)

}  // namespace mbt::sim

namespace mbt::env {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CommandRanges, vx, vy, omega, h, min_duration,
                                   max_duration, hold_probability)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConfigurationRanges, single_plate_half, bar_length,
                                   control_radius, triangle_radius, min_robot_spacing,
                                   min_triangle_height, extent_margin)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RewardWeights, feet_airtime, feet_contact,
                                   feet_stance_x, feet_stance_y, feet_orientation,
                                   relative_yaw, joint_force, base_height,
                                   base_acceleration, action_difference, torque,
                                   velocity_x, velocity_y, orientation_distance,
                                   orientation_alignment, airtime_target, stance_width)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TerminationLimits, max_tilt, max_relative_yaw,
                                   min_height, max_height, horizon)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EnvOptions, sim, randomization, randomize_dynamics,
                                   observation_noise, commands, configurations, rewards,
                                   limits, min_height_setpoint, min_push_steps,
                                   max_push_steps, max_push_gap)

}  // namespace mbt::env

namespace mbt::app {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvalSection, episodes, workers, seed, scenarios,
                                   commands, perturbations, payloads, logged_episodes)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TeleopSection, port, static_dir, scenario, seed,
                                   randomize_dynamics, max_pending_frames)

namespace {

json TrainToJson(const ppo::TrainerConfig& c) {
  json j{
      {"gamma", c.gamma},
      {"gae_lambda", c.gae_lambda},
      {"clip", c.clip},
      {"epochs", c.epochs},
      {"batch_episodes", c.batch_episodes},
      {"value_coef", c.value_coef},
      {"entropy_coef", c.entropy_coef},
      {"lr", c.lr},
      {"max_grad_norm", c.max_grad_norm},
      {"log_std_init", c.log_std_init},
      {"buffer_size", c.buffer_size},
      {"normalize_advantages", c.normalize_advantages},
      {"normalize_observations", c.normalize_observations},
      {"stage_budgets", c.stage_budgets},
      {"early_advance", c.early_advance},
      {"early_advance_length", c.early_advance_length},
      {"first_stage", c.first_stage},
      {"last_stage", c.last_stage},
      {"perturbation_bound", c.perturbation_bound},
      {"torsion_bound", c.torsion_bound},
      {"envs_per_worker", c.envs_per_worker},
      {"workers", c.workers},
      {"seed", c.seed},
      {"env", c.env},
  };
  j["fixed_config"] = c.fixed_config ? AttachmentToJson(*c.fixed_config) : json(nullptr);
  return j;
}

void TrainFromJson(const json& j, ppo::TrainerConfig& c) {
  j.at("gamma").get_to(c.gamma);
  j.at("gae_lambda").get_to(c.gae_lambda);
  j.at("clip").get_to(c.clip);
  j.at("epochs").get_to(c.epochs);
  j.at("batch_episodes").get_to(c.batch_episodes);
  j.at("value_coef").get_to(c.value_coef);
  j.at("entropy_coef").get_to(c.entropy_coef);
  j.at("lr").get_to(c.lr);
  j.at("max_grad_norm").get_to(c.max_grad_norm);
  j.at("log_std_init").get_to(c.log_std_init);
  j.at("buffer_size").get_to(c.buffer_size);
  j.at("normalize_advantages").get_to(c.normalize_advantages);
  j.at("normalize_observations").get_to(c.normalize_observations);
  j.at("stage_budgets").get_to(c.stage_budgets);
  j.at("early_advance").get_to(c.early_advance);
  j.at("early_advance_length").get_to(c.early_advance_length);
  j.at("first_stage").get_to(c.first_stage);
  j.at("last_stage").get_to(c.last_stage);
  j.at("perturbation_bound").get_to(c.perturbation_bound);
  j.at("torsion_bound").get_to(c.torsion_bound);
  j.at("envs_per_worker").get_to(c.envs_per_worker);
  j.at("workers").get_to(c.workers);
  j.at("seed").get_to(c.seed);
  j.at("env").get_to(c.env);
  const json& fixed = j.at("fixed_config");
  if (fixed.is_null()) {
    c.fixed_config.reset();
  } else {
    c.fixed_config = AttachmentFromJson(fixed);
  }
}

// Every key of `user` must exist in `defaults`; objects recurse. Free-form
// entries (null defaults such as fixed_config) accept anything.
void Overlay(json& target, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("config: " + path + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!target.contains(it.key())) throw ConfigError("config: unknown key " + key);
    json& slot = target[it.key()];
    if (slot.is_object() && it.value().is_object()) {
      Overlay(slot, it.value(), key);
    } else if (slot.is_object() && !it.value().is_object()) {
      throw ConfigError("config: " + key + " must be an object");
    } else {
      slot = it.value();
    }
  }
}

}  // namespace

json AttachmentToJson(const sim::AttachmentConfig& config) {
  json atts = json::array();
  for (const sim::Attachment& a : config.attachments) atts.push_back({a.radius, a.angle});
  json bars = json::array();
  for (const auto& [a, b] : config.bars) bars.push_back({a, b});
  return {{"attachments", atts},
          {"bar_mass", config.bar_mass},
          {"extent", config.carrier_extent},
          {"bars", bars}};
}

sim::AttachmentConfig AttachmentFromJson(const json& j) {
  sim::AttachmentConfig config;
  try {
    if (!j.is_object()) throw ConfigError("attachment configuration must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      if (k != "attachments" && k != "bar_mass" && k != "extent" && k != "bars") {
        throw ConfigError("attachment configuration: unknown key " + k);
      }
    }
    for (const json& a : j.at("attachments")) {
      if (!a.is_array() || a.size() != 2) throw ConfigError("attachment must be [R, theta]");
      config.attachments.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    config.bar_mass = j.value("bar_mass", 0.0);
    config.carrier_extent = j.at("extent").get<Polygon>();
    if (j.contains("bars")) {
      for (const json& b : j.at("bars")) {
        if (!b.is_array() || b.size() != 2) throw ConfigError("bar must be [i, j]");
        config.bars.emplace_back(b[0].get<int>(), b[1].get<int>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("attachment configuration: ") + e.what());
  }
  for (const auto& [a, b] : config.bars) {
    if (a < 0 || b < 0 || a >= config.NumRobots() || b >= config.NumRobots() || a == b) {
      throw ConfigError("attachment configuration: bar references a missing robot");
    }
  }
  config.Validate();
  return config;
}

json ConfigToJson(const AppConfig& config) {
  return {{"train", TrainToJson(config.train)},
          {"eval", config.eval},
          {"teleop", config.teleop}};
}

AppConfig ConfigFromJson(const json& user) {
  json merged = ConfigToJson(AppConfig{});
  Overlay(merged, user, "");
  AppConfig out;
  try {
    TrainFromJson(merged.at("train"), out.train);
    merged.at("eval").get_to(out.eval);
    merged.at("teleop").get_to(out.teleop);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ValidateConfig(out);
  return out;
}

AppConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return ConfigFromJson(j);
}

void ValidateConfig(const AppConfig& c) {
  const ppo::TrainerConfig& t = c.train;
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(t.gamma > 0.0 && t.gamma <= 1.0, "train.gamma must lie in (0, 1]");
  require(t.gae_lambda >= 0.0 && t.gae_lambda <= 1.0, "train.gae_lambda must lie in [0, 1]");
  require(t.clip > 0.0, "train.clip must be > 0");
  require(t.epochs >= 1, "train.epochs must be >= 1");
  require(t.batch_episodes >= 1, "train.batch_episodes must be >= 1");
  require(t.lr > 0.0, "train.lr must be > 0");
  require(t.max_grad_norm > 0.0, "train.max_grad_norm must be > 0");
  require(t.buffer_size >= 1, "train.buffer_size must be >= 1");
  require(t.first_stage >= 1 && t.last_stage <= env::kNumStages &&
              t.first_stage <= t.last_stage,
          "train.first_stage..last_stage must lie in 1..4");
  for (long long b : t.stage_budgets) require(b >= 0, "train.stage_budgets must be >= 0");
  require(t.envs_per_worker >= 1 && t.workers >= 1, "train.workers and envs_per_worker must be >= 1");
  require(t.perturbation_bound >= 0.0 && t.torsion_bound >= 0.0,
          "train perturbation bounds must be >= 0");
  require(t.env.sim.substeps >= 1 && t.env.sim.policy_dt > 0.0,
          "train.env.sim needs substeps >= 1 and policy_dt > 0");
  require(t.env.limits.horizon >= 1, "train.env.limits.horizon must be >= 1");
  require(c.eval.episodes >= 1 && c.eval.workers >= 1, "eval.episodes and eval.workers must be >= 1");
  for (double f : c.eval.perturbations) require(f >= 0.0, "eval.perturbations must be >= 0");
  for (double m : c.eval.payloads) require(m >= 0.0, "eval.payloads must be >= 0");
  require(c.teleop.port >= 0 && c.teleop.port <= 65535, "teleop.port must lie in 0..65535");
  require(c.teleop.max_pending_frames >= 1, "teleop.max_pending_frames must be >= 1");
}

int ResolvePort(const TeleopSection& teleop) {
  const char* env = std::getenv(kPortEnv);
  if (env == nullptr || *env == '\0') return teleop.port;
  char* end = nullptr;
  const long port = std::strtol(env, &end, 10);
  if (*end != '\0' || port < 0 || port > 65535) {
    throw ConfigError(std::string(kPortEnv) + " must be a port number, got '" + env + "'");
  }
  return static_cast<int>(port);
}

}  // namespace mbt::app
