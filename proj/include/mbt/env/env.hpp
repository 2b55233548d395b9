#ifndef MBT_ENV_ENV_HPP_
#define MBT_ENV_ENV_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mbt/common/random.hpp"
#include "mbt/env/command.hpp"
#include "mbt/env/configuration.hpp"
#include "mbt/env/curriculum.hpp"
#include "mbt/env/observation.hpp"
#include "mbt/env/rewards.hpp"
#include "mbt/env/termination.hpp"
#include "mbt/sim/system.hpp"

namespace mbt::env {

struct EnvOptions {
  sim::SimParams sim;
  sim::RandomizationRanges randomization;
  bool randomize_dynamics = true;
  bool observation_noise = true;
  CommandRanges commands;
  ConfigurationRanges configurations;
  RewardWeights rewards;
  TerminationLimits limits;
  // The leg height set point never goes below this, so a command at the
  // lowest height does not park the pelvis on the termination bound.
  double min_height_setpoint = 0.55;
  int min_push_steps = 50;
  int max_push_steps = 200;
  int max_push_gap = 100;
};

// Everything that defines one episode. Commands play in order, each for its
// duration; the last one then persists.
struct EpisodeSpec {
  sim::AttachmentConfig config;
  sim::PayloadSpec payload;
  sim::RandomizedDynamics dynamics;
  std::vector<Command> commands;
  std::vector<sim::PerturbationSpec> perturbations;
  std::vector<std::uint64_t> noise_seeds;  // one observation-noise stream per robot
  int horizon = 500;
  double initial_yaw = 0.0;
};

std::vector<sim::PerturbationSpec> SamplePerturbations(const CurriculumStage& stage,
                                                       int num_robots, int horizon,
                                                       Rng& rng,
                                                       const EnvOptions& options = {});

// A training episode for the stage. With `fixed_config` the configuration is
// not sampled (specialized training).
EpisodeSpec SampleEpisode(const CurriculumStage& stage, Rng& rng,
                          const EnvOptions& options = {},
                          const std::optional<sim::AttachmentConfig>& fixed_config = {});

struct StepResult {
  std::vector<Observation> observations;
  std::vector<RewardBreakdown> rewards;
  TerminationReason termination = TerminationReason::kNone;
  bool done = false;
};

class Env {
 public:
  explicit Env(EnvOptions options = {});

  std::vector<Observation> Reset(const EpisodeSpec& spec);
  // Throws UsageError once the episode is over.
  StepResult Step(std::span<const sim::ActionCommand> actions);
  // Replaces the active command from the next step on (live control). The
  // scheduled commands after it are dropped. Returns the observations
  // re-taken with the new command.
  std::vector<Observation> SetCommand(const Command& command);

  const sim::SimState& state() const { return state_; }
  sim::SimState& mutable_state() { return state_; }
  const EpisodeSpec& spec() const { return spec_; }
  const EnvOptions& options() const { return options_; }
  const Command& command() const { return spec_.commands[command_index_]; }
  int NumRobots() const { return state_.NumRobots(); }
  long step() const { return step_; }
  bool done() const { return done_; }
  double reference_yaw() const { return reference_yaw_; }
  TerminationReason termination() const { return termination_; }

 private:
  void ApplyCommand();
  std::vector<Observation> ObserveAll();

  EnvOptions options_;
  EpisodeSpec spec_;
  sim::SimState state_;
  std::vector<Rng> noise_rngs_;
  std::vector<sim::ActionCommand> previous_actions_;
  std::size_t command_index_ = 0;
  int command_steps_ = 0;
  long step_ = 0;
  double reference_yaw_ = 0.0;
  bool done_ = true;
  TerminationReason termination_ = TerminationReason::kNone;
};

}  // namespace mbt::env

#endif  // MBT_ENV_ENV_HPP_
