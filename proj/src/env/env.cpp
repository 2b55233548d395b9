#include "mbt/env/env.hpp"

#include <algorithm>
#include <cmath>

#include "mbt/common/errors.hpp"

namespace mbt::env {

std::vector<sim::PerturbationSpec> SamplePerturbations(const CurriculumStage& stage,
                                                       int num_robots, int horizon,
                                                       Rng& rng,
                                                       const EnvOptions& options) {
  std::vector<sim::PerturbationSpec> out;
  if (!stage.HasPerturbations()) return out;
  int t = UniformInt(rng, 0, options.max_push_gap);
  while (t < horizon) {
    sim::PerturbationSpec p;
    p.start_step = t;
    p.duration_steps = UniformInt(rng, options.min_push_steps, options.max_push_steps);
    const double magnitude = UniformReal(rng, 0.0, stage.perturbation_bound);
    const double angle = UniformReal(rng, -kPi, kPi);
    p.force = Vec3(magnitude * std::cos(angle), magnitude * std::sin(angle), 0.0);
    p.torque_z = UniformReal(rng, -stage.torsion_bound, stage.torsion_bound);
    p.target = sim::PerturbationSpec::kCarrier;
    if (stage.perturb_robots) p.target = UniformInt(rng, -1, num_robots - 1);
    out.push_back(p);
    t = p.EndStep() + UniformInt(rng, 0, options.max_push_gap);
  }
  return out;
}

EpisodeSpec SampleEpisode(const CurriculumStage& stage, Rng& rng,
                          const EnvOptions& options,
                          const std::optional<sim::AttachmentConfig>& fixed_config) {
  EpisodeSpec spec;
  spec.horizon = options.limits.horizon;
  spec.config = fixed_config ? *fixed_config
                             : SampleConfiguration(stage, rng, options.configurations);
  const int n = spec.config.NumRobots();
  if (options.randomize_dynamics) {
    spec.dynamics = sim::RandomizeDynamics(rng, options.randomization);
  }
  int covered = 0;
  while (covered < spec.horizon) {
    spec.commands.push_back(SampleCommand(rng, options.commands));
    covered += spec.commands.back().duration;
  }
  spec.perturbations = SamplePerturbations(stage, n, spec.horizon, rng, options);
  for (int r = 0; r < n; ++r) spec.noise_seeds.push_back(rng());
  spec.initial_yaw = UniformReal(rng, -kPi, kPi);
  return spec;
}

Env::Env(EnvOptions options) : options_(std::move(options)) {}

void Env::ApplyCommand() {
  const Command& c = command();
  state_.gait.hold_still = c.IsHoldStill();
  state_.gait.height = std::max(c.h, options_.min_height_setpoint);
}

std::vector<Observation> Env::ObserveAll() {
  std::vector<Observation> out;
  const double noise = options_.observation_noise ? spec_.dynamics.encoder_noise_std : 0.0;
  for (int r = 0; r < NumRobots(); ++r) {
    out.push_back(Observe(state_, r, command(), noise_rngs_[r], noise));
  }
  return out;
}

std::vector<Observation> Env::Reset(const EpisodeSpec& spec) {
  if (spec.commands.empty()) throw ConfigError("episode needs at least one command");
  const int n = spec.config.NumRobots();
  if (static_cast<int>(spec.noise_seeds.size()) != n) {
    throw ConfigError("episode needs one noise seed per robot");
  }
  spec_ = spec;
  command_index_ = 0;
  command_steps_ = 0;
  step_ = 0;
  done_ = false;
  termination_ = TerminationReason::kNone;
  const double start_height = std::max(spec_.commands[0].h, options_.min_height_setpoint);
  state_ = sim::BuildSystem(spec_.config, spec_.payload, spec_.dynamics, options_.sim,
                            start_height, spec_.initial_yaw);
  ApplyCommand();
  reference_yaw_ = Yaw(state_.CarrierOrientation());
  noise_rngs_.clear();
  for (std::uint64_t seed : spec_.noise_seeds) noise_rngs_.emplace_back(seed);
  sim::ActionCommand zero;
  zero.fill(0.0);
  previous_actions_.assign(n, zero);
  return ObserveAll();
}

std::vector<Observation> Env::SetCommand(const Command& command) {
  if (done_) throw UsageError("Env::SetCommand called on a finished episode; call Reset");
  spec_.commands.resize(command_index_ + 1);
  spec_.commands[command_index_] = command;
  ApplyCommand();
  return ObserveAll();
}

StepResult Env::Step(std::span<const sim::ActionCommand> actions) {
  if (done_) throw UsageError("Env::Step called on a finished episode; call Reset");
  if (static_cast<int>(actions.size()) != NumRobots()) {
    throw ShapeError("Env::Step: one action per robot required");
  }
  const Command active = command();
  sim::SimStep(state_, actions, spec_.perturbations);
  ++step_;
  reference_yaw_ += active.omega * options_.sim.policy_dt;

  StepResult result;
  result.rewards =
      ComputeRewards(state_, actions, previous_actions_, active,
                     ReferenceOrientation(state_.ground, reference_yaw_), options_.rewards);
  previous_actions_.assign(actions.begin(), actions.end());

  TerminationLimits limits = options_.limits;
  limits.horizon = spec_.horizon;
  termination_ = CheckTermination(state_, step_, limits);
  done_ = termination_ != TerminationReason::kNone;
  result.termination = termination_;
  result.done = done_;

  if (++command_steps_ >= active.duration && command_index_ + 1 < spec_.commands.size()) {
    ++command_index_;
    command_steps_ = 0;
    ApplyCommand();
  }
  result.observations = ObserveAll();
  return result;
}

}  // namespace mbt::env
