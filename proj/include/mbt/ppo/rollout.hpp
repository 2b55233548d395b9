#ifndef MBT_PPO_ROLLOUT_HPP_
#define MBT_PPO_ROLLOUT_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mbt/env/curriculum.hpp"
#include "mbt/env/env.hpp"
#include "mbt/env/rewards.hpp"
#include "mbt/nn/tape.hpp"
#include "mbt/ppo/config.hpp"
#include "mbt/ppo/runner.hpp"

namespace mbt::ppo {

// One robot's experience over one episode. Episodes start from zero
// recurrent state, so the stored initial state is implicit.
struct Trajectory {
  std::uint64_t episode = 0;
  int robot = 0;
  int num_robots = 1;
  nn::Matrix observations;  // policy input, obs x T
  nn::Matrix actions;       // sampled, before clipping, action x T
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;
  bool terminated = false;       // failure; no bootstrap
  double bootstrap_value = 0.0;  // critic value after the last step on truncation
  std::vector<double> advantages;
  std::vector<double> returns;

  int length() const { return static_cast<int>(rewards.size()); }
};

struct EpisodeRecord {
  std::uint64_t episode = 0;
  int num_robots = 1;
  int length = 0;
  env::TerminationReason termination = env::TerminationReason::kNone;
  double mean_return = 0.0;  // per robot, undiscounted
  std::array<double, env::kNumLocalTerms + env::kNumGlobalTerms> term_means{};  // per robot step
};

struct RolloutBatch {
  std::vector<Trajectory> trajectories;
  std::vector<EpisodeRecord> episodes;
  nn::Matrix raw_observations;  // every observation the policy saw, for statistics
  int discarded_episodes = 0;
  std::vector<std::string> faults;

  long long transitions() const;
};

struct CollectSettings {
  int min_transitions = 60000;
  int num_envs = 8;
  int workers = 1;
  // Collection gives up with TrainingFault after this many faulted episodes
  // in a row.
  int max_consecutive_faults = 100;
};

// Runs whole episodes of the stage under the shared policy until at least
// `min_transitions` robot steps are stored. Randomness comes only from
// `seed`. Episodes whose physics faults are discarded and reported in
// `faults`; collection continues.
RolloutBatch CollectRollouts(const PolicyBundle& policy, const env::CurriculumStage& stage,
                             const TrainerConfig& config, const CollectSettings& settings,
                             std::uint64_t seed);

// Fills advantages and returns of every trajectory.
void ComputeAdvantages(std::vector<Trajectory>& trajectories, double gamma, double lambda);

}  // namespace mbt::ppo

#endif  // MBT_PPO_ROLLOUT_HPP_
